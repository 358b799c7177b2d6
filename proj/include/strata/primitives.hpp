// Composable mapping primitives over (graph, mapping) search states: graph
// transformation (tiling), task assignment (block placement), synchronization
// (barrier insertion), and state control (snapshot/restore).  Every primitive
// is a pure function from state to state and appends a replayable lineage
// record.

#pragma once

#include "strata/hardware.hpp"
#include "strata/mapping.hpp"
#include "strata/task_graph.hpp"

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace strata {

struct PrimitiveError : std::runtime_error {
    explicit PrimitiveError(const std::string& what) : std::runtime_error(what) {}
};

struct PrimitiveRecord {
    std::string name;
    std::vector<std::string> args;
};

struct SearchState {
    TaskGraph graph;
    Mapping mapping;
    std::vector<PrimitiveRecord> lineage;
    int sync_counter = 0;
};

namespace detail {

// ceiling-first split: first (total % parts) shares get one extra unit
inline std::vector<std::int64_t> split_even(std::int64_t total, std::int64_t parts) {
    std::vector<std::int64_t> out(parts, total / parts);
    std::int64_t rem = total % parts;
    for (std::int64_t i = 0; i < rem; ++i) out[i]++;
    return out;
}

// integer split proportional to weights, remainder to the largest shares first
inline std::vector<std::int64_t> split_proportional(std::int64_t total,
                                                    const std::vector<std::int64_t>& weights) {
    std::int64_t wsum = 0;
    for (auto w : weights) wsum += w;
    std::vector<std::int64_t> out(weights.size(), 0);
    if (wsum == 0) return split_even(total, (std::int64_t)weights.size());
    std::int64_t assigned = 0;
    std::vector<std::pair<std::int64_t, std::size_t>> rema;  // remainder numerator, index
    for (std::size_t i = 0; i < weights.size(); ++i) {
        out[i] = total * weights[i] / wsum;
        assigned += out[i];
        rema.push_back({total * weights[i] % wsum, i});
    }
    std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (std::int64_t i = 0; i < total - assigned; ++i) out[rema[i % rema.size()].second]++;
    return out;
}

}  // namespace detail

// Replace a compute or storage task by prod(tile_vector) sub-tasks with work
// divided evenly (ceiling-first) and dependencies fanned out all-to-all with
// carried bytes split in proportion to the destination tile work.
inline SearchState tile_task(const SearchState& s, const std::string& task,
                             const std::vector<std::int64_t>& tile_vector) {
    const Task& t = s.graph.task(task);
    if (t.kind == TaskKind::communication || t.kind == TaskKind::sync)
        throw PrimitiveError(task + ": cannot tile a " + std::string(to_string(t.kind)) + " task");
    std::int64_t parts = 1;
    for (auto v : tile_vector) {
        if (v <= 0) throw PrimitiveError(task + ": zero or negative split in tile vector");
        parts *= v;
    }
    SearchState out = s;
    {
        std::ostringstream rec;
        for (auto v : tile_vector) rec << v << " ";
        out.lineage.push_back({"tile_task", {task, rec.str()}});
    }
    if (parts == 1) return out;  // identity transform

    auto ops = detail::split_even(t.ops, parts);
    auto bin = detail::split_even(t.bytes_in, parts);
    auto bout = detail::split_even(t.bytes_out, parts);
    auto size = detail::split_even(t.size, parts);

    std::vector<std::string> subs;
    for (std::int64_t i = 0; i < parts; ++i) subs.push_back(task + "." + std::to_string(i));

    TaskGraph g2;
    for (const Task& old : s.graph.tasks()) {
        if (old.id == task) {
            for (std::int64_t i = 0; i < parts; ++i) {
                Task sub = old;
                sub.id = subs[i];
                sub.ops = ops[i];
                sub.bytes_in = bin[i];
                sub.bytes_out = bout[i];
                sub.size = size[i];
                g2.add_task(sub);
            }
        } else {
            g2.add_task(old);
        }
    }
    std::vector<std::int64_t> tile_work;
    for (std::int64_t i = 0; i < parts; ++i)
        tile_work.push_back(t.kind == TaskKind::compute ? std::max<std::int64_t>(ops[i], 1)
                                                        : std::max<std::int64_t>(size[i], 1));
    for (const Dependency& d : s.graph.deps()) {
        if (d.src != task && d.dst != task) {
            g2.add_dependency(d);
            continue;
        }
        if (d.src == task && d.dst == task) continue;  // self loops are invalid anyway
        if (d.dst == task) {
            auto share = detail::split_proportional(d.bytes, tile_work);
            for (std::int64_t i = 0; i < parts; ++i)
                g2.add_dependency({d.src, subs[i], share[i]});
        } else {
            auto share = detail::split_even(d.bytes, parts);
            for (std::int64_t i = 0; i < parts; ++i)
                g2.add_dependency({subs[i], d.dst, share[i]});
        }
    }
    out.graph = std::move(g2);
    out.mapping = out.mapping.erase_node(task);
    return out;
}

enum class AssignPolicy { round_robin, row_major };

inline AssignPolicy assign_policy_from(const std::string& s) {
    if (s == "round-robin") return AssignPolicy::round_robin;
    if (s == "row-major") return AssignPolicy::row_major;
    throw PrimitiveError("unknown assignment policy '" + s + "'");
}

// Place tasks over the kind-compatible points inside a region.
inline SearchState assign_block(const SearchState& s, const std::vector<std::string>& tasks,
                                const HardwareModel& model, const MultiLevelCoord& region,
                                AssignPolicy policy) {
    SearchState out = s;
    {
        PrimitiveRecord rec{"assign_block", {}};
        for (const auto& t : tasks) rec.args.push_back(t);
        rec.args.push_back(region.str());
        rec.args.push_back(policy == AssignPolicy::round_robin ? "round-robin" : "row-major");
        out.lineage.push_back(std::move(rec));
    }
    if (tasks.empty()) return out;

    for (const auto& t : tasks) (void)s.graph.task(t);  // existence check
    TaskKind kind = s.graph.task(tasks.front()).kind;
    for (const auto& t : tasks)
        if (s.graph.task(t).kind != kind)
            throw PrimitiveError("assign_block: tasks mix kinds (" + tasks.front() + " vs " + t + ")");
    PointKind want = kind == TaskKind::storage ? PointKind::memory : PointKind::compute;
    if (kind != TaskKind::compute && kind != TaskKind::storage)
        throw PrimitiveError("assign_block places compute or storage tasks only");

    std::vector<MultiLevelCoord> slots;
    for (const auto& [coord, pt] : model.enumerate_points(want)) {
        bool inside = coord.levels.size() >= region.levels.size();
        for (std::size_t l = 0; inside && l < region.levels.size(); ++l)
            inside = coord.levels[l] == region.levels[l];
        if (inside) slots.push_back(coord);
    }
    if (slots.empty())
        throw PrimitiveError("assign_block: region " + region.str() + " contains no " +
                             std::string(to_string(want)) + " points");
    if (policy == AssignPolicy::row_major && tasks.size() > slots.size())
        throw PrimitiveError("assign_block: region " + region.str() + " has " +
                             std::to_string(slots.size()) + " points for " +
                             std::to_string(tasks.size()) + " tasks under row-major");
    for (std::size_t i = 0; i < tasks.size(); ++i)
        out.mapping = out.mapping.map_node(tasks[i], slots[i % slots.size()]);
    return out;
}

// Barrier immediately after a set of placed tasks: a fresh sync id fans out
// over the hosting points.
inline SearchState insert_sync_barrier(const SearchState& s, const std::vector<std::string>& after,
                                       const HardwareModel& model) {
    if (after.empty()) throw PrimitiveError("insert_sync_barrier: empty task set");
    SearchState out = s;
    {
        PrimitiveRecord rec{"insert_sync_barrier", after};
        out.lineage.push_back(std::move(rec));
    }
    std::string sync_id = "barrier" + std::to_string(out.sync_counter++);
    std::vector<MultiLevelCoord> coords;
    std::map<std::string, std::string> pos;
    for (const auto& t : after) {
        auto at = s.mapping.placed_at(t);
        if (!at) throw PrimitiveError("insert_sync_barrier: task '" + t + "' is not placed");
        model.point_at(*at);
        bool dup = false;
        for (const auto& c : coords) dup |= (c == *at);
        if (!dup) coords.push_back(*at);
        pos[at->str()] = t;
    }
    out.mapping = out.mapping.sync(sync_id, coords, pos);
    return out;
}

// --- state control -----------------------------------------------------------

class SnapshotStore {
public:
    std::uint64_t snapshot(const SearchState& s) {
        std::uint64_t tok = next_++;
        store_.emplace(tok, s);
        return tok;
    }
    SearchState restore(std::uint64_t token) const {
        auto it = store_.find(token);
        if (it == store_.end())
            throw PrimitiveError("unknown snapshot token " + std::to_string(token));
        return it->second;
    }

private:
    std::map<std::uint64_t, SearchState> store_;
    std::uint64_t next_ = 1;
};

// ---------------------------------------------------------------------------
// Line-oriented primitive scripts, consumed by the `map` command.
//
//   tile_task <task> <s1> [s2 ...]
//   assign_block <task> [task ...] region=<coord> policy=<row-major|round-robin>
//   map_node <task> <coord>
//   map_edge <edge> path=<coord>;<coord>;... [subpaths=(r,c)(r,c)|...] [domains=d;d]
//   sync <sync_id> <coord> [coord ...]
//   insert_sync_barrier <task> [task ...]
//   time <task> <t_n,...,t_1>

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : line) {
        if (c == '(') depth++;
        if (c == ')') depth--;
        if (std::isspace((unsigned char)c) && depth == 0) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline std::vector<std::vector<std::int64_t>> parse_waypoints(const std::string& text) {
    // (r,c)(r,c)...
    std::vector<std::vector<std::int64_t>> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '(') throw PrimitiveError("bad waypoint list '" + text + "'");
        auto close = text.find(')', i);
        if (close == std::string::npos) throw PrimitiveError("bad waypoint list '" + text + "'");
        std::vector<std::int64_t> tuple;
        std::string inner = text.substr(i + 1, close - i - 1);
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) tuple.push_back(std::stoll(item));
        out.push_back(std::move(tuple));
        i = close + 1;
    }
    return out;
}

}  // namespace detail

inline SearchState apply_script_line(const SearchState& s, const HardwareModel& model,
                                     const std::string& line) {
    auto tok = detail::tokenize(line);
    if (tok.empty() || tok.front().starts_with("#")) return s;
    const std::string& op = tok.front();
    if (op == "tile_task") {
        if (tok.size() < 3) throw PrimitiveError("tile_task needs a task and at least one split");
        std::vector<std::int64_t> tv;
        for (std::size_t i = 2; i < tok.size(); ++i) tv.push_back(std::stoll(tok[i]));
        return tile_task(s, tok[1], tv);
    }
    if (op == "assign_block") {
        std::vector<std::string> tasks;
        std::optional<MultiLevelCoord> region;
        AssignPolicy policy = AssignPolicy::row_major;
        for (std::size_t i = 1; i < tok.size(); ++i) {
            if (tok[i].starts_with("region=")) {
                region = MultiLevelCoord::parse(tok[i].substr(7));
            } else if (tok[i].starts_with("policy=")) {
                policy = assign_policy_from(tok[i].substr(7));
            } else {
                tasks.push_back(tok[i]);
            }
        }
        if (!region) throw PrimitiveError("assign_block needs region=<coord>");
        return assign_block(s, tasks, model, *region, policy);
    }
    if (op == "map_node") {
        if (tok.size() != 3) throw PrimitiveError("map_node needs a task and a coordinate");
        SearchState out = s;
        MultiLevelCoord c = MultiLevelCoord::parse(tok[2]);
        const Task& t = out.graph.task(tok[1]);
        const SpacePoint& p = model.point_at(c);
        if (!kind_compatible(t.kind, p.kind))
            throw PrimitiveError(tok[1] + ": " + std::string(to_string(t.kind)) +
                                 " task cannot map to " + to_string(p.kind) + " point " + c.str());
        out.mapping = out.mapping.map_node(tok[1], c);
        out.lineage.push_back({"map_node", {tok[1], tok[2]}});
        return out;
    }
    if (op == "map_edge") {
        if (tok.size() < 3) throw PrimitiveError("map_edge needs an edge and path=");
        SearchState out = s;
        std::vector<MultiLevelCoord> path;
        std::vector<std::vector<std::vector<std::int64_t>>> subs;
        std::vector<int> domains;
        for (std::size_t i = 2; i < tok.size(); ++i) {
            if (tok[i].starts_with("path=")) {
                std::stringstream ss(tok[i].substr(5));
                std::string c;
                while (std::getline(ss, c, ';')) path.push_back(MultiLevelCoord::parse(c));
            } else if (tok[i].starts_with("subpaths=")) {
                std::stringstream ss(tok[i].substr(9));
                std::string c;
                while (std::getline(ss, c, '|')) subs.push_back(detail::parse_waypoints(c));
            } else if (tok[i].starts_with("domains=")) {
                std::stringstream ss(tok[i].substr(8));
                std::string c;
                while (std::getline(ss, c, ';')) domains.push_back(std::stoi(c));
            }
        }
        if (subs.empty() && path.size() >= 1) subs.assign(path.size() - 1, {});
        out.mapping = out.mapping.map_edge(tok[1], path, subs, domains);
        derive_segments(model, out.mapping.edge_maps().at(tok[1]));  // validate now
        out.lineage.push_back({"map_edge", {tok[1]}});
        return out;
    }
    if (op == "sync") {
        if (tok.size() < 3) throw PrimitiveError("sync needs a sync_id and coordinates");
        SearchState out = s;
        std::vector<MultiLevelCoord> coords;
        for (std::size_t i = 2; i < tok.size(); ++i) coords.push_back(MultiLevelCoord::parse(tok[i]));
        for (const auto& c : coords) model.point_at(c);
        out.mapping = out.mapping.sync(tok[1], coords);
        out.lineage.push_back({"sync", {tok[1]}});
        return out;
    }
    if (op == "insert_sync_barrier") {
        std::vector<std::string> after(tok.begin() + 1, tok.end());
        return insert_sync_barrier(s, after, model);
    }
    if (op == "time") {
        if (tok.size() != 3) throw PrimitiveError("time needs a task and a tuple");
        SearchState out = s;
        TimeCoord tc;
        std::stringstream ss(tok[2]);
        std::string item;
        while (std::getline(ss, item, ',')) tc.t.push_back(std::stoll(item));
        (void)out.graph.task(tok[1]);
        out.mapping = out.mapping.set_time(tok[1], tc);
        out.lineage.push_back({"time", {tok[1], tok[2]}});
        return out;
    }
    throw PrimitiveError("unknown primitive '" + op + "'");
}

inline SearchState apply_script(const SearchState& s, const HardwareModel& model,
                                const std::string& text) {
    SearchState cur = s;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        try {
            cur = apply_script_line(cur, model, line);
        } catch (const std::exception& e) {
            throw PrimitiveError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cur;
}

}  // namespace strata
