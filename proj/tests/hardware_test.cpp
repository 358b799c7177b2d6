#include "strata/hardware.hpp"
#include "strata/hardware_loader.hpp"

#include <gtest/gtest.h>

using namespace strata;

namespace {

PointDesc core(const std::string& name) {
    PointDesc p;
    p.name = name;
    p.kind = PointKind::compute;
    p.params["throughput"] = 1;
    return p;
}

PointDesc sram(const std::string& name, std::int64_t cap) {
    PointDesc p;
    p.name = name;
    p.kind = PointKind::memory;
    p.params["capacity"] = cap;
    p.params["bandwidth"] = 64;
    return p;
}

CommDesc comm(TopologyPattern pat, int bw = 1, int lat = 0) {
    CommDesc c;
    c.spec.pattern = pat;
    c.spec.link_bandwidth = bw;
    c.spec.hop_latency = lat;
    return c;
}

// board -> package -> chiplet -> core, heterogeneous at the package level
HardwareDescription four_level_desc() {
    MatrixDesc chiplet;
    chiplet.name = "chiplet";
    chiplet.dims = {2};
    chiplet.comm = {comm(TopologyPattern::ring)};
    chiplet.elements = {ElementDesc::of(core("c0")), ElementDesc::of(core("c1"))};

    MatrixDesc package;
    package.name = "pkg";
    package.dims = {3};
    package.comm = {comm(TopologyPattern::bus)};
    MatrixDesc chiplet2 = chiplet;
    chiplet2.name = "chiplet2";
    package.elements = {ElementDesc::of(chiplet), ElementDesc::of(chiplet2),
                        ElementDesc::of(sram("io", 1 << 20))};

    MatrixDesc board;
    board.name = "board";
    board.dims = {2, 2};
    board.comm = {comm(TopologyPattern::mesh2d)};
    MatrixDesc p0 = package, p1 = package, p2 = package, p3 = package;
    p0.name = "pkg0";
    p1.name = "pkg1";
    p2.name = "pkg2";
    p3.name = "pkg3";
    board.elements = {ElementDesc::of(p0), ElementDesc::of(p1), ElementDesc::of(p2),
                      ElementDesc::of(p3)};

    HardwareDescription d;
    d.root = ElementDesc::of(board);
    return d;
}

}  // namespace

TEST(Coord, ParsePrintRoundTrip) {
    MultiLevelCoord c = MultiLevelCoord::parse("((0,1)->(2)->comm0)");
    EXPECT_EQ(c.levels.size(), 3u);
    EXPECT_EQ(c.levels[0].idx, (std::vector<std::int64_t>{0, 1}));
    EXPECT_TRUE(c.levels[2].is_comm());
    EXPECT_EQ(c.str(), "((0,1)->(2)->comm0)");
    EXPECT_EQ(MultiLevelCoord::parse("()").levels.size(), 0u);
}

TEST(Build, FourLevelModel) {
    HardwareModel m = build(four_level_desc());
    EXPECT_EQ(m.depth, 4);
    auto counts = m.point_counts();
    // 4 packages x 2 chiplets x 2 cores
    EXPECT_EQ(counts[PointKind::compute], 16);
    // one io sram per package
    EXPECT_EQ(counts[PointKind::memory], 4);
    // board + 4 packages + 8 chiplets
    EXPECT_EQ(counts[PointKind::communication], 13);
    EXPECT_TRUE(validate(m).empty());
}

TEST(Build, SinglePointDepthZero) {
    HardwareDescription d;
    d.root = ElementDesc::of(core("solo"));
    HardwareModel m = build(d);
    EXPECT_EQ(m.depth, 0);
    EXPECT_EQ(m.point_table.size(), 1u);
    auto got = m.retrieve(MultiLevelCoord{});
    EXPECT_TRUE(std::holds_alternative<const SpacePoint*>(got));
}

TEST(Build, TwoByTwoMeshCounts) {
    MatrixDesc md;
    md.dims = {2, 2};
    md.comm = {comm(TopologyPattern::mesh2d)};
    md.elements = {ElementDesc::of(core("a")), ElementDesc::of(core("b")),
                   ElementDesc::of(core("c")), ElementDesc::of(core("d"))};
    HardwareDescription d;
    d.root = ElementDesc::of(md);
    HardwareModel m = build(d);
    // 4 leaves + 1 communication point
    EXPECT_EQ(m.point_table.size(), 5u);
}

TEST(Build, ErrorsAreSpecific) {
    MatrixDesc md;
    md.dims = {3};
    md.comm = {comm(TopologyPattern::mesh2d)};  // needs 2-D
    md.elements = {ElementDesc::of(core("a")), ElementDesc::of(core("b")),
                   ElementDesc::of(core("c"))};
    HardwareDescription d;
    d.root = ElementDesc::of(md);
    EXPECT_THROW(build(d), BuildError);

    MatrixDesc bad;
    bad.dims = {2};
    bad.elements = {ElementDesc::of(core("x"))};  // count mismatch
    HardwareDescription d2;
    d2.root = ElementDesc::of(bad);
    EXPECT_THROW(build(d2), BuildError);

    PointDesc dangling = core("y");
    dangling.evaluator = "no-such-model";
    MatrixDesc md3;
    md3.dims = {1};
    md3.elements = {ElementDesc::of(dangling)};
    HardwareDescription d3;
    d3.root = ElementDesc::of(md3);
    EXPECT_THROW(build(d3), BuildError);
}

TEST(Build, CyclicDescriptionRejected) {
    auto md = std::make_shared<MatrixDesc>();
    md->name = "loop";
    md->dims = {1};
    ElementDesc self;
    self.matrix = md;
    md->elements = {self};
    HardwareDescription d;
    d.root.matrix = md;
    EXPECT_THROW(build(d), BuildError);
}

TEST(Retrieve, PrefixAndErrors) {
    HardwareModel m = build(four_level_desc());
    // partial coordinate names the matrix at that prefix
    auto got = m.retrieve(MultiLevelCoord::parse("((0,0)->(0))"));
    ASSERT_TRUE(std::holds_alternative<const SpaceMatrix*>(got));
    EXPECT_EQ(std::get<const SpaceMatrix*>(got)->name, "chiplet");
    // empty coordinate names the root
    auto root = m.retrieve(MultiLevelCoord{});
    ASSERT_TRUE(std::holds_alternative<const SpaceMatrix*>(root));
    EXPECT_EQ(std::get<const SpaceMatrix*>(root)->name, "board");
    // full coordinate names a point
    const SpacePoint& p = m.point_at(MultiLevelCoord::parse("((0,1)->(1)->(0))"));
    EXPECT_EQ(p.kind, PointKind::compute);
    // out of range
    EXPECT_THROW(m.retrieve(MultiLevelCoord::parse("((0,2))")), std::out_of_range);
    // arity mismatch
    EXPECT_THROW(m.retrieve(MultiLevelCoord::parse("((0))")), std::out_of_range);
    // descending below a leaf
    EXPECT_THROW(m.retrieve(MultiLevelCoord::parse("((0,0)->(2)->(0))")), std::out_of_range);
}

TEST(Enumerate, RowMajorAndFilters) {
    MatrixDesc md;
    md.dims = {2, 2};
    md.comm = {comm(TopologyPattern::mesh2d)};
    md.elements = {ElementDesc::of(core("a")), ElementDesc::of(core("b")),
                   ElementDesc::of(core("c")), ElementDesc::of(core("d"))};
    HardwareDescription d;
    d.root = ElementDesc::of(md);
    HardwareModel m = build(d);
    auto computes = m.enumerate_points(PointKind::compute);
    ASSERT_EQ(computes.size(), 4u);
    EXPECT_EQ(computes[0].first.str(), "((0,0))");
    EXPECT_EQ(computes[1].first.str(), "((0,1))");
    EXPECT_EQ(computes[2].first.str(), "((1,0))");
    EXPECT_EQ(computes[3].first.str(), "((1,1))");
    // empty filter match
    EXPECT_TRUE(m.enumerate_points(PointKind::memory).empty());
}

TEST(Enumerate, CommPointsOnePerMatrix) {
    HardwareModel m = build(four_level_desc());
    auto comms = m.enumerate_points(PointKind::communication);
    // every matrix in the tree declares one domain: board + 4 pkg + 8 chiplets
    EXPECT_EQ(comms.size(), 13u);
    // the reserved address is the owner prefix plus a comm index
    EXPECT_EQ(comms[0].first.str(), "(comm0)");
}

TEST(Enumerate, RetrieveAgreesWithEnumeration) {
    HardwareModel m = build(four_level_desc());
    for (const auto& [coord, pt] : m.enumerate_points()) {
        const SpacePoint& got = m.point_at(coord);
        EXPECT_EQ(got.id, pt->id);
    }
}

TEST(Enumerate, DepthRange) {
    // nest matrices 1..6 deep; build and enumerate at every depth
    for (int depth = 1; depth <= 6; ++depth) {
        MatrixDesc cur;
        cur.name = "leafmat";
        cur.dims = {2};
        cur.comm = {comm(TopologyPattern::ring)};
        cur.elements = {ElementDesc::of(core("x")), ElementDesc::of(core("y"))};
        for (int d2 = 1; d2 < depth; ++d2) {
            MatrixDesc outer;
            outer.name = "level" + std::to_string(d2);
            outer.dims = {1};
            outer.comm = {comm(TopologyPattern::bus)};
            outer.elements = {ElementDesc::of(cur)};
            cur = outer;
        }
        HardwareDescription d;
        d.root = ElementDesc::of(cur);
        HardwareModel m = build(d);
        EXPECT_EQ(m.depth, depth);
        EXPECT_EQ(m.enumerate_points(PointKind::compute).size(), 2u);
    }
}

TEST(Enumerate, HeterogeneousSiblingDepths) {
    MatrixDesc inner;
    inner.name = "deep";
    inner.dims = {2};
    inner.comm = {comm(TopologyPattern::ring)};
    inner.elements = {ElementDesc::of(core("a")), ElementDesc::of(core("b"))};
    MatrixDesc root;
    root.name = "mix";
    root.dims = {2};
    root.comm = {comm(TopologyPattern::bus)};
    root.elements = {ElementDesc::of(inner), ElementDesc::of(core("flat"))};
    HardwareDescription d;
    d.root = ElementDesc::of(root);
    HardwareModel m = build(d);
    EXPECT_EQ(m.depth, 2);
    EXPECT_EQ(m.enumerate_points(PointKind::compute).size(), 3u);
    EXPECT_TRUE(validate(m).empty());
}

TEST(Validate, ReportsBrokenModels) {
    // hand-built model with a mesh on a 1-D matrix and duplicate ids
    auto bad = std::make_shared<SpaceMatrix>();
    bad->name = "bad";
    bad->dims = {2};
    SpacePoint a;
    a.id = "dup";
    a.kind = PointKind::compute;
    a.evaluator = "roofline";
    SpacePoint b = a;  // same id
    bad->elements = {a, b};
    SpacePoint noc;
    noc.id = "noc";
    noc.kind = PointKind::communication;
    noc.evaluator = "link";
    noc.topology = TopologySpec{TopologyPattern::mesh2d, 1, 0, RoutingPolicy::dimension_order};
    bad->comm_points = {noc};
    HardwareModel m;
    m.root = MatrixPtr(bad);
    auto diags = validate(m);
    bool saw_dup = false, saw_dim = false;
    for (const auto& d : diags) {
        if (d.message.find("duplicate") != std::string::npos) saw_dup = true;
        if (d.message.find("requires") != std::string::npos) saw_dim = true;
    }
    EXPECT_TRUE(saw_dup);
    EXPECT_TRUE(saw_dim);
    EXPECT_TRUE(validate(build(four_level_desc())).empty());
}

TEST(Routes, MeshDimensionOrderExpansion) {
    TopologySpec spec{TopologyPattern::mesh2d, 1, 0, RoutingPolicy::dimension_order};
    auto r = expand_waypoints(spec, {3, 3}, {{0, 0}, {2, 0}, {2, 2}});
    EXPECT_EQ(r.hops, 4);
    ASSERT_EQ(r.links.size(), 4u);
    EXPECT_EQ(r.links[0], "0,0>1,0");
    EXPECT_EQ(r.links[1], "1,0>2,0");
    EXPECT_EQ(r.links[2], "2,0>2,1");
    EXPECT_EQ(r.links[3], "2,1>2,2");
}

TEST(Routes, ShortestPathRequiresUnitSteps) {
    TopologySpec spec{TopologyPattern::mesh2d, 1, 0, RoutingPolicy::shortest_path};
    EXPECT_THROW(expand_waypoints(spec, {3, 3}, {{0, 0}, {2, 0}}), RouteError);
    auto ok = expand_waypoints(spec, {3, 3}, {{0, 0}, {1, 0}, {2, 0}});
    EXPECT_EQ(ok.hops, 2);
}

TEST(Routes, TorusWrapsShortestWay) {
    TopologySpec spec{TopologyPattern::torus2d, 1, 0, RoutingPolicy::dimension_order};
    auto r = expand_waypoints(spec, {4, 4}, {{0, 0}, {3, 0}});
    EXPECT_EQ(r.hops, 1);  // wraps 0 -> 3 directly
    EXPECT_EQ(r.links[0], "0,0>3,0");
}

TEST(Routes, BusSharesOneMedium) {
    TopologySpec spec{TopologyPattern::bus, 1, 0, RoutingPolicy::dimension_order};
    auto r = expand_waypoints(spec, {4}, {{0}, {2}, {3}});
    EXPECT_EQ(r.links, std::vector<std::string>{"bus"});
    EXPECT_EQ(r.hops, 2);
}

TEST(Routes, OutOfRangeWaypoint) {
    TopologySpec spec{TopologyPattern::ring, 1, 0, RoutingPolicy::dimension_order};
    EXPECT_THROW(expand_waypoints(spec, {4}, {{0}, {4}}), RouteError);
    EXPECT_THROW(expand_waypoints(spec, {4}, {{0, 1}}), RouteError);
}

TEST(Loader, ParsesDocument) {
    std::string text = R"json({
      "name": "board", "dims": [2],
      "comm": {"pattern": "ring", "link_bandwidth": 2, "hop_latency": 1},
      "elements": [
        {"name": "c0", "kind": "compute", "params": {"throughput": 4}},
        {"name": "m0", "kind": "memory", "params": {"capacity": 1024, "bandwidth": 8}}
      ],
      "virtual_groups": [{"name": "g", "time_level": 2, "members": ["((0))", "((1))"]}]
    })json";
    HardwareModel m = build(parse_hardware_description(text));
    EXPECT_EQ(m.depth, 1);
    EXPECT_EQ(m.point_table.size(), 3u);
    EXPECT_EQ(m.virtual_groups.count("g"), 1u);
    const SpacePoint& c0 = m.point_at(MultiLevelCoord::parse("((0))"));
    EXPECT_EQ(c0.param_or("throughput", 0), Rat(4));
    EXPECT_EQ(c0.evaluator, "roofline");
}

TEST(Loader, ParseErrorCitesLine) {
    std::string text = "{\n  \"dims\": [2,\n}";
    try {
        parse_hardware_description(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Loader, SemanticErrorCitesField) {
    std::string text = R"json({"dims": [1], "elements": [{"name": "x"}]})json";
    try {
        parse_hardware_description(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("elements[0].kind"), std::string::npos) << e.what();
    }
}

TEST(Loader, RepeatExpandsInline) {
    std::string text = R"json({
      "name": "m", "dims": [4],
      "comm": {"pattern": "ring", "link_bandwidth": 1},
      "elements": [{"repeat": 4, "element": {"kind": "compute", "params": {"throughput": 1}}}]
    })json";
    HardwareModel m = build(parse_hardware_description(text));
    EXPECT_EQ(m.enumerate_points(PointKind::compute).size(), 4u);
}
