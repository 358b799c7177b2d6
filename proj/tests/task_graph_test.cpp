#include "strata/task_graph.hpp"

#include <gtest/gtest.h>

using namespace strata;

namespace {

Task comp(const std::string& id, std::int64_t ops = 1) {
    Task t;
    t.id = id;
    t.kind = TaskKind::compute;
    t.ops = ops;
    return t;
}

Task comm(const std::string& id, std::int64_t vol) {
    Task t;
    t.id = id;
    t.kind = TaskKind::communication;
    t.volume = vol;
    return t;
}

}  // namespace

TEST(Graph, ChainIsValid) {
    TaskGraph g;
    g.add_task(comp("A"));
    g.add_task(comp("B"));
    g.add_task(comp("C"));
    g.add_dependency({"A", "B", 8});
    g.add_dependency({"B", "C", 8});
    EXPECT_TRUE(g.validate_graph().empty());
    EXPECT_EQ(g.inputs(), std::vector<std::string>{"A"});
}

TEST(Graph, SelfLoopReported) {
    TaskGraph g;
    g.add_task(comp("A"));
    g.add_dependency({"A", "A", 0});
    auto diags = g.validate_graph();
    ASSERT_FALSE(diags.empty());
    EXPECT_NE(diags.front().message.find("cycle"), std::string::npos);
}

TEST(Graph, DiamondInputs) {
    TaskGraph g;
    for (auto id : {"A", "B", "C", "D"}) g.add_task(comp(id));
    g.add_dependency({"A", "B", 1});
    g.add_dependency({"A", "C", 1});
    g.add_dependency({"B", "D", 1});
    g.add_dependency({"C", "D", 1});
    EXPECT_TRUE(g.validate_graph().empty());
    EXPECT_EQ(g.inputs(), std::vector<std::string>{"A"});
    auto layers = g.topological_layers();
    ASSERT_EQ(layers.size(), 3u);
    EXPECT_EQ(layers[0], std::vector<std::string>{"A"});
    EXPECT_EQ(layers[1], (std::vector<std::string>{"B", "C"}));
    EXPECT_EQ(layers[2], std::vector<std::string>{"D"});
}

TEST(Graph, ConstructorErrors) {
    TaskGraph g;
    g.add_task(comp("A"));
    EXPECT_THROW(g.add_task(comp("A")), GraphError);              // duplicate id
    EXPECT_THROW(g.add_dependency({"A", "nope", 0}), GraphError); // dangling endpoint
    EXPECT_THROW(g.add_task(comm("E", 0)), GraphError);           // zero-volume transfer
}

TEST(Graph, EmptyLayering) {
    TaskGraph g;
    EXPECT_TRUE(g.topological_layers().empty());
}

TEST(Graph, ContentionExampleLayering) {
    // E feeds the two transfers; one chain continues A -> B -> C -> D, the
    // other F -> G
    TaskGraph g;
    g.add_task(comp("E", 100));
    g.add_task(comm("A", 50));
    g.add_task(comm("F", 150));
    g.add_task(comp("B", 100));
    g.add_task(comm("C", 50));
    g.add_task(comp("D", 10));
    g.add_task(comp("G", 10));
    g.add_dependency({"E", "A", 50});
    g.add_dependency({"E", "F", 150});
    g.add_dependency({"A", "B", 50});
    g.add_dependency({"B", "C", 50});
    g.add_dependency({"C", "D", 50});
    g.add_dependency({"F", "G", 150});
    auto layers = g.topological_layers();
    ASSERT_EQ(layers.size(), 5u);
    EXPECT_EQ(layers[0], std::vector<std::string>{"E"});
    EXPECT_EQ(layers[1], (std::vector<std::string>{"A", "F"}));
    EXPECT_EQ(layers[2], (std::vector<std::string>{"B", "G"}));
    EXPECT_EQ(layers[3], std::vector<std::string>{"C"});
    EXPECT_EQ(layers[4], std::vector<std::string>{"D"});
}

TEST(Graph, LayeringMatchesValidation) {
    // layering succeeds exactly when validation accepts
    TaskGraph bad;
    bad.add_task(comp("A"));
    bad.add_task(comp("B"));
    bad.add_dependency({"A", "B", 0});
    bad.add_dependency({"B", "A", 0});
    EXPECT_FALSE(bad.validate_graph().empty());
    EXPECT_THROW(bad.topological_layers(), GraphError);
}

TEST(Graph, SerializationRoundTrip) {
    TaskGraph g;
    g.add_task(comp("A", 42));
    Task st;
    st.id = "M";
    st.kind = TaskKind::storage;
    st.size = 1024;
    g.add_task(st);
    g.add_task(comm("T", 77));
    Task sy;
    sy.id = "S";
    sy.kind = TaskKind::sync;
    sy.sync_id = "b0";
    g.add_task(sy);
    g.add_dependency({"A", "T", 77});
    g.add_dependency({"M", "A", 1024});
    TaskGraph g2 = TaskGraph::from_json(g.to_json());
    EXPECT_EQ(g2.to_json(), g.to_json());
    EXPECT_EQ(g2.tasks().size(), 4u);
    EXPECT_EQ(g2.task("T").volume, 77);
    EXPECT_EQ(g2.task("S").sync_id, "b0");
}
