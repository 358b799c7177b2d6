// Recursive hardware model: nested element matrices terminating in leaf
// points (compute / memory / communication), a multi-level coordinate system,
// and per-level interconnect descriptions with deterministic route expansion.

#pragma once

#include "strata/rational.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace strata {

enum class PointKind { compute, memory, communication, absent };

enum class TopologyPattern { mesh2d, torus2d, torus3d, ring, bus, tree, fully_connected };

enum class RoutingPolicy { dimension_order, shortest_path };

inline const char* to_string(PointKind k) {
    switch (k) {
        case PointKind::compute: return "compute";
        case PointKind::memory: return "memory";
        case PointKind::communication: return "communication";
        case PointKind::absent: return "absent";
    }
    return "?";
}

inline const char* to_string(TopologyPattern p) {
    switch (p) {
        case TopologyPattern::mesh2d: return "mesh2d";
        case TopologyPattern::torus2d: return "torus2d";
        case TopologyPattern::torus3d: return "torus3d";
        case TopologyPattern::ring: return "ring";
        case TopologyPattern::bus: return "bus";
        case TopologyPattern::tree: return "tree";
        case TopologyPattern::fully_connected: return "fully-connected";
    }
    return "?";
}

inline const char* to_string(RoutingPolicy r) {
    return r == RoutingPolicy::dimension_order ? "dimension-order" : "shortest-path";
}

inline std::optional<TopologyPattern> topology_pattern_from(const std::string& s) {
    if (s == "mesh2d") return TopologyPattern::mesh2d;
    if (s == "torus2d") return TopologyPattern::torus2d;
    if (s == "torus3d") return TopologyPattern::torus3d;
    if (s == "ring") return TopologyPattern::ring;
    if (s == "bus") return TopologyPattern::bus;
    if (s == "tree") return TopologyPattern::tree;
    if (s == "fully-connected" || s == "fully_connected") return TopologyPattern::fully_connected;
    return std::nullopt;
}

inline std::optional<PointKind> point_kind_from(const std::string& s) {
    if (s == "compute") return PointKind::compute;
    if (s == "memory") return PointKind::memory;
    if (s == "communication") return PointKind::communication;
    if (s == "absent") return PointKind::absent;
    return std::nullopt;
}

struct TopologySpec {
    TopologyPattern pattern = TopologyPattern::bus;
    Rat link_bandwidth = 1;   // bytes/cycle
    std::int64_t hop_latency = 0;  // cycles/hop
    RoutingPolicy routing = RoutingPolicy::dimension_order;
};

// How many dims a pattern demands; 0 means any dimensionality is accepted.
inline int pattern_required_dims(TopologyPattern p) {
    switch (p) {
        case TopologyPattern::mesh2d:
        case TopologyPattern::torus2d: return 2;
        case TopologyPattern::torus3d: return 3;
        case TopologyPattern::ring: return 1;
        default: return 0;
    }
}

struct SpacePoint {
    std::string id;
    PointKind kind = PointKind::compute;
    std::map<std::string, Rat> params;
    std::optional<TopologySpec> topology;  // communication points only
    std::string evaluator;

    Rat param_or(const std::string& key, const Rat& fallback) const {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }
    bool has_param(const std::string& key) const { return params.count(key) > 0; }
};

// ---------------------------------------------------------------------------
// Multi-level coordinates.  One LevelIndex per nesting level; a level entry is
// either an index tuple into that level's matrix or the reserved address of
// one of the matrix's communication domains.

struct LevelIndex {
    std::vector<std::int64_t> idx;
    int comm_domain = -1;

    bool is_comm() const { return comm_domain >= 0; }

    static LevelIndex tuple(std::vector<std::int64_t> v) {
        LevelIndex li;
        li.idx = std::move(v);
        return li;
    }
    static LevelIndex comm(int domain) {
        LevelIndex li;
        li.comm_domain = domain;
        return li;
    }

    friend bool operator==(const LevelIndex& a, const LevelIndex& b) {
        return a.comm_domain == b.comm_domain && a.idx == b.idx;
    }
    friend bool operator<(const LevelIndex& a, const LevelIndex& b) {
        // comm entries sort before regular tuples at the same level
        if (a.is_comm() != b.is_comm()) return a.is_comm();
        if (a.is_comm()) return a.comm_domain < b.comm_domain;
        return a.idx < b.idx;
    }
};

struct MultiLevelCoord {
    std::vector<LevelIndex> levels;

    bool empty() const { return levels.empty(); }
    std::size_t depth() const { return levels.size(); }

    MultiLevelCoord prefix(std::size_t n) const {
        MultiLevelCoord c;
        c.levels.assign(levels.begin(), levels.begin() + std::min(n, levels.size()));
        return c;
    }
    MultiLevelCoord with(LevelIndex li) const {
        MultiLevelCoord c = *this;
        c.levels.push_back(std::move(li));
        return c;
    }

    // ((a,b)->(c)->comm0)
    std::string str() const {
        std::ostringstream os;
        os << "(";
        for (std::size_t l = 0; l < levels.size(); ++l) {
            if (l) os << "->";
            const LevelIndex& li = levels[l];
            if (li.is_comm()) {
                os << "comm" << li.comm_domain;
            } else {
                os << "(";
                for (std::size_t i = 0; i < li.idx.size(); ++i) {
                    if (i) os << ",";
                    os << li.idx[i];
                }
                os << ")";
            }
        }
        os << ")";
        return os.str();
    }

    static MultiLevelCoord parse(const std::string& text);

    friend bool operator==(const MultiLevelCoord& a, const MultiLevelCoord& b) {
        return a.levels == b.levels;
    }
    friend bool operator<(const MultiLevelCoord& a, const MultiLevelCoord& b) {
        return std::lexicographical_compare(a.levels.begin(), a.levels.end(),
                                            b.levels.begin(), b.levels.end());
    }
};

inline MultiLevelCoord MultiLevelCoord::parse(const std::string& text) {
    MultiLevelCoord out;
    std::size_t i = 0;
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("bad coordinate '" + text + "': " + why);
    };
    auto skip_ws = [&] { while (i < text.size() && std::isspace((unsigned char)text[i])) ++i; };
    skip_ws();
    if (i >= text.size() || text[i] != '(') fail("expected '('");
    ++i;
    skip_ws();
    if (i < text.size() && text[i] == ')') return out;  // "()" = root
    while (true) {
        skip_ws();
        if (i < text.size() && text.compare(i, 4, "comm") == 0) {
            i += 4;
            std::size_t start = i;
            while (i < text.size() && std::isdigit((unsigned char)text[i])) ++i;
            if (i == start) fail("comm domain index missing");
            out.levels.push_back(LevelIndex::comm(std::stoi(text.substr(start, i - start))));
        } else if (i < text.size() && text[i] == '(') {
            ++i;
            LevelIndex li;
            while (true) {
                skip_ws();
                std::size_t start = i;
                if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
                while (i < text.size() && std::isdigit((unsigned char)text[i])) ++i;
                if (i == start) fail("expected index");
                li.idx.push_back(std::stoll(text.substr(start, i - start)));
                skip_ws();
                if (i < text.size() && text[i] == ',') { ++i; continue; }
                if (i < text.size() && text[i] == ')') { ++i; break; }
                fail("expected ',' or ')'");
            }
            out.levels.push_back(std::move(li));
        } else {
            fail("expected level entry");
        }
        skip_ws();
        if (i + 1 < text.size() && text[i] == '-' && text[i + 1] == '>') { i += 2; continue; }
        if (i < text.size() && text[i] == ')') { ++i; break; }
        fail("expected '->' or ')'");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Built model structures.

struct SpaceMatrix;
using MatrixPtr = std::shared_ptr<const SpaceMatrix>;
using Element = std::variant<SpacePoint, MatrixPtr>;

struct SpaceMatrix {
    std::string name;
    std::vector<std::int64_t> dims;
    std::vector<Element> elements;  // row-major, size == product(dims)
    std::vector<SpacePoint> comm_points;
    bool is_virtual_group = false;
    std::vector<MultiLevelCoord> group_members;  // virtual groups reference, not own
    int time_level = 0;  // virtual groups: which time-coordinate level they fence

    std::int64_t extent() const {
        std::int64_t n = 1;
        for (auto d : dims) n *= d;
        return n;
    }
    std::int64_t linear_index(const std::vector<std::int64_t>& idx) const {
        std::int64_t lin = 0;
        for (std::size_t i = 0; i < dims.size(); ++i) lin = lin * dims[i] + idx[i];
        return lin;
    }
};

struct Diagnostic {
    std::string locus;
    std::string message;
};

class BuildError : public std::runtime_error {
public:
    explicit BuildError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Description structures (programmatic form of the hardware file).

struct PointDesc {
    std::string name;
    PointKind kind = PointKind::compute;
    std::map<std::string, Rat> params;
    std::string evaluator;  // empty: kind default
};

struct MatrixDesc;

struct CommDesc {
    std::string name;  // empty: "comm<domain>"
    TopologySpec spec;
    std::string evaluator;  // empty: "link"
};

struct ElementDesc {
    std::shared_ptr<PointDesc> point;
    std::shared_ptr<MatrixDesc> matrix;

    static ElementDesc of(PointDesc p) {
        ElementDesc e;
        e.point = std::make_shared<PointDesc>(std::move(p));
        return e;
    }
    static ElementDesc of(MatrixDesc m);
};

struct GroupDesc {
    std::string name;
    int time_level = 2;
    std::vector<std::string> members;  // coordinate strings
};

struct MatrixDesc {
    std::string name;
    std::vector<std::int64_t> dims;
    std::vector<CommDesc> comm;
    std::vector<ElementDesc> elements;
};

inline ElementDesc ElementDesc::of(MatrixDesc m) {
    ElementDesc e;
    e.matrix = std::make_shared<MatrixDesc>(std::move(m));
    return e;
}

struct HardwareDescription {
    ElementDesc root;
    std::vector<GroupDesc> virtual_groups;
};

inline std::set<std::string> default_evaluator_names() {
    return {"roofline", "link", "allreduce", "storage", "none"};
}

inline std::string default_evaluator_for(PointKind k) {
    switch (k) {
        case PointKind::compute: return "roofline";
        case PointKind::memory: return "storage";
        case PointKind::communication: return "link";
        case PointKind::absent: return "none";
    }
    return "none";
}

// ---------------------------------------------------------------------------
// The operable model: immutable after build, indexed for retrieval and
// enumeration.

class HardwareModel {
public:
    Element root{SpacePoint{}};
    std::map<std::string, SpaceMatrix> virtual_groups;

    struct PointEntry {
        MultiLevelCoord coord;
        SpacePoint point;
    };
    std::vector<PointEntry> point_table;       // enumeration order; flat id = index
    std::map<MultiLevelCoord, int> point_ids;  // coord -> flat id
    int depth = 0;

    using Retrieved = std::variant<const SpacePoint*, const SpaceMatrix*>;

    Retrieved retrieve(const MultiLevelCoord& coord) const {
        const Element* cur = &root;
        for (std::size_t l = 0; l < coord.levels.size(); ++l) {
            const auto* mp = std::get_if<MatrixPtr>(cur);
            if (!mp) {
                throw std::out_of_range("coordinate " + coord.str() +
                                        " descends below a leaf point at level " + std::to_string(l));
            }
            const SpaceMatrix& m = **mp;
            const LevelIndex& li = coord.levels[l];
            if (li.is_comm()) {
                if (li.comm_domain >= (int)m.comm_points.size()) {
                    throw std::out_of_range("coordinate " + coord.str() + ": matrix '" + m.name +
                                            "' has no communication domain " +
                                            std::to_string(li.comm_domain));
                }
                if (l + 1 != coord.levels.size()) {
                    throw std::out_of_range("coordinate " + coord.str() +
                                            ": communication address must be the final level");
                }
                return &m.comm_points[li.comm_domain];
            }
            if (li.idx.size() != m.dims.size()) {
                throw std::out_of_range("coordinate " + coord.str() + ": level " + std::to_string(l) +
                                        " arity " + std::to_string(li.idx.size()) + " != matrix '" +
                                        m.name + "' dimensionality " + std::to_string(m.dims.size()));
            }
            for (std::size_t i = 0; i < li.idx.size(); ++i) {
                if (li.idx[i] < 0 || li.idx[i] >= m.dims[i]) {
                    throw std::out_of_range("coordinate " + coord.str() + ": index " +
                                            std::to_string(li.idx[i]) + " out of range [0," +
                                            std::to_string(m.dims[i]) + ") in matrix '" + m.name + "'");
                }
            }
            cur = &m.elements[m.linear_index(li.idx)];
        }
        if (const auto* p = std::get_if<SpacePoint>(cur)) return p;
        return std::get<MatrixPtr>(*cur).get();
    }

    const SpacePoint& point_at(const MultiLevelCoord& coord) const {
        auto r = retrieve(coord);
        if (const SpacePoint* const* p = std::get_if<const SpacePoint*>(&r)) return **p;
        throw std::out_of_range("coordinate " + coord.str() + " names a matrix, not a point");
    }

    int point_id(const MultiLevelCoord& coord) const {
        auto it = point_ids.find(coord);
        if (it == point_ids.end())
            throw std::out_of_range("coordinate " + coord.str() + " is not a point of this model");
        return it->second;
    }

    std::vector<std::pair<MultiLevelCoord, const SpacePoint*>> enumerate_points(
        const std::function<bool(const SpacePoint&)>& filter) const {
        std::vector<std::pair<MultiLevelCoord, const SpacePoint*>> out;
        for (const auto& e : point_table) {
            if (filter(e.point)) out.emplace_back(e.coord, &e.point);
        }
        return out;
    }
    std::vector<std::pair<MultiLevelCoord, const SpacePoint*>> enumerate_points(PointKind k) const {
        return enumerate_points([k](const SpacePoint& p) { return p.kind == k; });
    }
    std::vector<std::pair<MultiLevelCoord, const SpacePoint*>> enumerate_points() const {
        return enumerate_points([](const SpacePoint&) { return true; });
    }

    std::map<PointKind, int> point_counts() const {
        std::map<PointKind, int> n;
        for (const auto& e : point_table) n[e.point.kind]++;
        return n;
    }
};

// ---------------------------------------------------------------------------
// Builder.

namespace detail {

inline void index_points(const Element& e, const MultiLevelCoord& prefix, int level,
                         HardwareModel& model) {
    model.depth = std::max(model.depth, level);
    if (const auto* p = std::get_if<SpacePoint>(&e)) {
        (void)p;
        int id = (int)model.point_table.size();
        model.point_table.push_back({prefix, std::get<SpacePoint>(e)});
        model.point_ids[prefix] = id;
        return;
    }
    const SpaceMatrix& m = *std::get<MatrixPtr>(e);
    for (int d = 0; d < (int)m.comm_points.size(); ++d) {
        MultiLevelCoord c = prefix.with(LevelIndex::comm(d));
        int id = (int)model.point_table.size();
        model.point_table.push_back({c, m.comm_points[d]});
        model.point_ids[c] = id;
    }
    std::vector<std::int64_t> idx(m.dims.size(), 0);
    for (std::int64_t lin = 0; lin < m.extent(); ++lin) {
        index_points(m.elements[lin], prefix.with(LevelIndex::tuple(idx)), level + 1, model);
        for (int i = (int)idx.size() - 1; i >= 0; --i) {
            if (++idx[i] < m.dims[i]) break;
            idx[i] = 0;
        }
    }
}

inline SpacePoint build_point(const PointDesc& d, const std::string& path,
                              const std::set<std::string>& evaluators) {
    SpacePoint p;
    p.id = path;
    p.kind = d.kind;
    p.params = d.params;
    p.evaluator = d.evaluator.empty() ? default_evaluator_for(d.kind) : d.evaluator;
    if (!evaluators.count(p.evaluator)) {
        throw BuildError(path + ": unknown evaluator '" + p.evaluator + "'");
    }
    return p;
}

inline Element build_element(const ElementDesc& d, const std::string& path,
                             const std::set<std::string>& evaluators,
                             std::set<const MatrixDesc*>& on_path,
                             std::set<std::string>& ids) {
    if (d.point && d.matrix) throw BuildError(path + ": element is both a point and a matrix");
    if (!d.point && !d.matrix) throw BuildError(path + ": empty element description");
    if (d.point) {
        SpacePoint p = build_point(*d.point, path, evaluators);
        if (p.kind == PointKind::communication) {
            throw BuildError(path + ": communication points are declared per matrix, not as elements");
        }
        if (!ids.insert(p.id).second) throw BuildError(path + ": duplicate element id '" + p.id + "'");
        return p;
    }
    const MatrixDesc& md = *d.matrix;
    if (on_path.count(d.matrix.get())) {
        throw BuildError(path + ": cyclic description (matrix reachable from itself)");
    }
    on_path.insert(d.matrix.get());
    if (!ids.insert(path).second) throw BuildError(path + ": duplicate element id '" + path + "'");

    auto m = std::make_shared<SpaceMatrix>();
    m->name = md.name.empty() ? path : md.name;
    m->dims = md.dims;
    if (m->dims.empty()) throw BuildError(path + ": matrix has no dims");
    std::int64_t ext = 1;
    for (auto dim : m->dims) {
        if (dim <= 0) throw BuildError(path + ": non-positive extent in dims");
        ext *= dim;
    }
    if ((std::int64_t)md.elements.size() != ext) {
        throw BuildError(path + ": dims declare " + std::to_string(ext) + " elements, found " +
                         std::to_string(md.elements.size()));
    }
    for (int dom = 0; dom < (int)md.comm.size(); ++dom) {
        const CommDesc& cd = md.comm[dom];
        int need = pattern_required_dims(cd.spec.pattern);
        if (need && need != (int)m->dims.size()) {
            throw BuildError(path + ".comm[" + std::to_string(dom) + "]: pattern " +
                             to_string(cd.spec.pattern) + " requires a " + std::to_string(need) +
                             "-D matrix, got " + std::to_string(m->dims.size()) + "-D");
        }
        if (cd.spec.link_bandwidth <= 0) {
            throw BuildError(path + ".comm[" + std::to_string(dom) + "]: link_bandwidth must be > 0");
        }
        if (cd.spec.hop_latency < 0) {
            throw BuildError(path + ".comm[" + std::to_string(dom) + "]: hop_latency must be >= 0");
        }
        SpacePoint p;
        p.id = path + "." + (cd.name.empty() ? "comm" + std::to_string(dom) : cd.name);
        p.kind = PointKind::communication;
        p.topology = cd.spec;
        p.evaluator = cd.evaluator.empty() ? "link" : cd.evaluator;
        if (!evaluators.count(p.evaluator)) {
            throw BuildError(p.id + ": unknown evaluator '" + p.evaluator + "'");
        }
        if (!ids.insert(p.id).second) throw BuildError(p.id + ": duplicate element id");
        m->comm_points.push_back(std::move(p));
    }
    std::vector<std::int64_t> idx(m->dims.size(), 0);
    for (std::int64_t lin = 0; lin < ext; ++lin) {
        std::string child_name;
        if (md.elements[lin].point && !md.elements[lin].point->name.empty()) {
            child_name = md.elements[lin].point->name;
        } else if (md.elements[lin].matrix && !md.elements[lin].matrix->name.empty()) {
            child_name = md.elements[lin].matrix->name;
        } else {
            child_name = std::to_string(lin);
        }
        m->elements.push_back(
            build_element(md.elements[lin], path + "." + child_name, evaluators, on_path, ids));
        for (int i = (int)idx.size() - 1; i >= 0; --i) {
            if (++idx[i] < m->dims[i]) break;
            idx[i] = 0;
        }
    }
    on_path.erase(d.matrix.get());
    return MatrixPtr(m);
}

}  // namespace detail

inline HardwareModel build(const HardwareDescription& desc,
                           const std::set<std::string>& evaluators = default_evaluator_names()) {
    HardwareModel model;
    std::set<const MatrixDesc*> on_path;
    std::set<std::string> ids;
    std::string root_name = "root";
    if (desc.root.matrix && !desc.root.matrix->name.empty()) root_name = desc.root.matrix->name;
    if (desc.root.point && !desc.root.point->name.empty()) root_name = desc.root.point->name;
    model.root = detail::build_element(desc.root, root_name, evaluators, on_path, ids);
    detail::index_points(model.root, MultiLevelCoord{}, 0, model);

    for (const GroupDesc& g : desc.virtual_groups) {
        SpaceMatrix vm;
        vm.name = g.name;
        vm.is_virtual_group = true;
        vm.time_level = g.time_level;
        vm.dims = {(std::int64_t)g.members.size()};
        if (g.time_level < 2) {
            throw BuildError("virtual group '" + g.name + "': time_level must be >= 2");
        }
        for (const std::string& ms : g.members) {
            MultiLevelCoord c = MultiLevelCoord::parse(ms);
            model.retrieve(c);  // throws when unresolvable
            vm.group_members.push_back(std::move(c));
        }
        if (model.virtual_groups.count(g.name)) {
            throw BuildError("duplicate virtual group '" + g.name + "'");
        }
        model.virtual_groups.emplace(g.name, std::move(vm));
    }
    return model;
}

// ---------------------------------------------------------------------------
// Model validation (re-derives the structural invariants as diagnostics).

namespace detail {

inline void validate_element(const Element& e, const std::string& path,
                             std::set<std::string>& seen, std::vector<Diagnostic>& out) {
    if (const auto* p = std::get_if<SpacePoint>(&e)) {
        if (!seen.insert(p->id).second)
            out.push_back({path, "duplicate point id '" + p->id + "'"});
        if (p->kind == PointKind::communication && !p->topology)
            out.push_back({path, "communication point lacks a topology spec"});
        if (p->kind != PointKind::communication && p->topology)
            out.push_back({path, "non-communication point carries a topology spec"});
        if (p->evaluator.empty())
            out.push_back({path, "point has no evaluator binding"});
        return;
    }
    const SpaceMatrix& m = *std::get<MatrixPtr>(e);
    std::int64_t ext = 1;
    for (auto d : m.dims) {
        if (d <= 0) out.push_back({path, "non-positive extent in dims"});
        ext *= std::max<std::int64_t>(d, 0);
    }
    if ((std::int64_t)m.elements.size() != ext)
        out.push_back({path, "element count " + std::to_string(m.elements.size()) +
                                 " does not match dims product " + std::to_string(ext)});
    if (m.is_virtual_group && !m.comm_points.empty())
        out.push_back({path, "virtual group owns communication points"});
    for (std::size_t d = 0; d < m.comm_points.size(); ++d) {
        const SpacePoint& cp = m.comm_points[d];
        if (!seen.insert(cp.id).second)
            out.push_back({path, "duplicate point id '" + cp.id + "'"});
        if (!cp.topology) {
            out.push_back({path, "communication point '" + cp.id + "' lacks a topology spec"});
            continue;
        }
        int need = pattern_required_dims(cp.topology->pattern);
        if (need && need != (int)m.dims.size())
            out.push_back({path, std::string("pattern ") + to_string(cp.topology->pattern) +
                                     " requires " + std::to_string(need) + "-D, matrix is " +
                                     std::to_string(m.dims.size()) + "-D"});
        if (cp.topology->link_bandwidth <= 0)
            out.push_back({path, "link_bandwidth must be > 0"});
        if (cp.topology->hop_latency < 0)
            out.push_back({path, "hop_latency must be >= 0"});
    }
    for (std::size_t i = 0; i < m.elements.size(); ++i)
        validate_element(m.elements[i], path + "[" + std::to_string(i) + "]", seen, out);
}

}  // namespace detail

inline std::vector<Diagnostic> validate(const HardwareModel& model) {
    std::vector<Diagnostic> out;
    std::set<std::string> seen;
    detail::validate_element(model.root, "root", seen, out);
    for (const auto& [name, g] : model.virtual_groups) {
        if (!g.is_virtual_group)
            out.push_back({"groups." + name, "group not flagged virtual"});
        for (const auto& c : g.group_members) {
            try {
                model.retrieve(c);
            } catch (const std::exception& e) {
                out.push_back({"groups." + name, std::string("member unresolvable: ") + e.what()});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Route expansion: waypoint sequences within one level become directed unit
// links under the level's topology.  Link keys are local to the owning
// communication point.

struct RouteExpansion {
    std::vector<std::string> links;  // deduplicated, insertion order
    std::int64_t hops = 0;
};

class RouteError : public std::runtime_error {
public:
    explicit RouteError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string coord_key(const std::vector<std::int64_t>& c) {
    std::string s;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(c[i]);
    }
    return s;
}

inline void add_link(RouteExpansion& out, const std::string& key) {
    if (std::find(out.links.begin(), out.links.end(), key) == out.links.end())
        out.links.push_back(key);
    out.hops++;
}

inline void add_step(RouteExpansion& out, const std::vector<std::int64_t>& from,
                     const std::vector<std::int64_t>& to) {
    add_link(out, coord_key(from) + ">" + coord_key(to));
}

// One grid step toward `to` along dimension `dim`, with optional wraparound.
inline std::vector<std::int64_t> grid_step(std::vector<std::int64_t> at, std::size_t dim,
                                           std::int64_t target, std::int64_t extent, bool wrap) {
    std::int64_t fwd = (target - at[dim] + extent) % extent;
    std::int64_t bwd = (at[dim] - target + extent) % extent;
    std::int64_t d;
    if (!wrap) {
        d = target > at[dim] ? 1 : -1;
    } else {
        d = fwd <= bwd ? 1 : -1;  // tie goes to the increasing direction
    }
    at[dim] = at[dim] + d;
    if (wrap) at[dim] = (at[dim] + extent) % extent;
    return at;
}

inline void expand_grid(RouteExpansion& out, const TopologySpec& spec,
                        const std::vector<std::int64_t>& dims, std::vector<std::int64_t> from,
                        const std::vector<std::int64_t>& to, bool wrap) {
    if (spec.routing == RoutingPolicy::shortest_path) {
        // caller supplies the exact route: each waypoint pair must be one hop
        int changed = -1;
        for (std::size_t i = 0; i < from.size(); ++i) {
            if (from[i] != to[i]) {
                if (changed >= 0)
                    throw RouteError("non-adjacent hop " + coord_key(from) + ">" + coord_key(to) +
                                     " under shortest-path routing (one dimension per hop)");
                changed = (int)i;
            }
        }
        if (changed < 0) return;  // same coordinate, no hop
        std::int64_t dist = std::abs(from[changed] - to[changed]);
        std::int64_t wdist = dims[changed] - dist;
        if (dist != 1 && !(wrap && wdist == 1))
            throw RouteError("non-adjacent hop " + coord_key(from) + ">" + coord_key(to) +
                             " under shortest-path routing (unit steps required)");
        add_step(out, from, to);
        return;
    }
    // dimension-order: walk each dimension in tuple order
    for (std::size_t dim = 0; dim < from.size(); ++dim) {
        while (from[dim] != to[dim]) {
            auto next = grid_step(from, dim, to[dim], dims[dim], wrap);
            add_step(out, from, next);
            from = next;
        }
    }
}

inline std::int64_t linear_of(const std::vector<std::int64_t>& dims,
                              const std::vector<std::int64_t>& idx) {
    std::int64_t lin = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) lin = lin * dims[i] + idx[i];
    return lin;
}

}  // namespace detail

inline RouteExpansion expand_waypoints(const TopologySpec& spec,
                                       const std::vector<std::int64_t>& dims,
                                       const std::vector<std::vector<std::int64_t>>& waypoints) {
    RouteExpansion out;
    if (waypoints.empty()) throw RouteError("sub-path has no waypoints");
    std::int64_t ext = 1;
    for (auto d : dims) ext *= d;
    for (const auto& w : waypoints) {
        if (w.size() != dims.size())
            throw RouteError("waypoint arity " + std::to_string(w.size()) +
                             " does not match level dimensionality " + std::to_string(dims.size()));
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (w[i] < 0 || w[i] >= dims[i])
                throw RouteError("waypoint " + detail::coord_key(w) + " out of range");
        }
    }
    for (std::size_t s = 0; s + 1 < waypoints.size(); ++s) {
        const auto& a = waypoints[s];
        const auto& b = waypoints[s + 1];
        if (a == b) continue;
        switch (spec.pattern) {
            case TopologyPattern::mesh2d:
                detail::expand_grid(out, spec, dims, a, b, /*wrap=*/false);
                break;
            case TopologyPattern::torus2d:
            case TopologyPattern::torus3d:
                detail::expand_grid(out, spec, dims, a, b, /*wrap=*/true);
                break;
            case TopologyPattern::ring:
                detail::expand_grid(out, spec, dims, a, b, /*wrap=*/true);
                break;
            case TopologyPattern::bus:
                detail::add_link(out, "bus");
                break;
            case TopologyPattern::fully_connected:
                detail::add_link(out, detail::coord_key(a) + ">" + detail::coord_key(b));
                break;
            case TopologyPattern::tree: {
                // balanced binary tree over the row-major linearization;
                // route climbs to the lowest common ancestor and descends
                std::int64_t u = detail::linear_of(dims, a) + ext;  // heap positions
                std::int64_t v = detail::linear_of(dims, b) + ext;
                std::vector<std::int64_t> up, down;
                std::int64_t x = u, y = v;
                while (x != y) {
                    if (x > y) {
                        up.push_back(x);
                        x /= 2;
                    } else {
                        down.push_back(y);
                        y /= 2;
                    }
                }
                for (auto n : up) detail::add_link(out, "u:" + std::to_string(n));
                for (auto it = down.rbegin(); it != down.rend(); ++it)
                    detail::add_link(out, "d:" + std::to_string(*it));
                break;
            }
        }
    }
    return out;
}

}  // namespace strata
