// Spatiotemporal mapping IR: spatial task placement, cross-level route
// decomposition for communication tasks, synchronization records, and
// multi-level time coordinates over virtual groups.
//
// Mapping values are immutable; every operation returns an updated copy so
// search drivers can branch freely.

#pragma once

#include "strata/hardware.hpp"
#include "strata/task_graph.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace strata {

struct MappingError : std::runtime_error {
    explicit MappingError(const std::string& what) : std::runtime_error(what) {}
};

// Route of one communication task: N critical cross-level coordinates and the
// N-1 intra-level waypoint sequences between them.
struct EdgeRoute {
    std::string edge;
    std::vector<MultiLevelCoord> path;
    std::vector<std::vector<std::vector<std::int64_t>>> sub_paths;
    std::vector<int> domains;  // per segment; missing entries default to 0
    bool auto_routed = false;
};

struct TimeCoord {
    std::vector<std::int64_t> t;  // outermost level first: (t_n, ..., t_1)
};

struct SyncMember {
    MultiLevelCoord coord;
    std::vector<std::string> wait_for;  // member completes no earlier than these
    std::vector<std::string> gates;     // these cannot start before the barrier releases
};

struct SyncRecord {
    std::string sync_id;
    std::vector<MultiLevelCoord> points;
    std::map<std::string, std::string> after;  // coord string -> task positioned before
    int seq = -1;                               // queue-insertion position (user records)
    bool generated = false;                     // produced by lower_time_coords
    std::vector<SyncMember> members;            // explicit form (generated records)
};

struct MappingGroup {
    int time_level = 2;
    std::vector<MultiLevelCoord> members;
};

// One intra-level piece of a decomposed communication task.
struct RouteSegment {
    MultiLevelCoord owner;      // coordinate prefix of the owning matrix
    MultiLevelCoord comm_coord; // owner + reserved comm-domain address
    int domain = 0;
    std::vector<std::vector<std::int64_t>> waypoints;
    RouteExpansion expansion;
    TopologySpec spec;
};

class Mapping {
public:
    // --- task assignment ---------------------------------------------------

    Mapping map_node(const std::string& task, const MultiLevelCoord& coord) const {
        Mapping m = *this;
        m.node_map_[task] = coord;
        if (!m.place_seq_.count(task)) m.place_seq_[task] = m.next_seq_++;
        return m;
    }

    Mapping map_edge(const std::string& edge, std::vector<MultiLevelCoord> path,
                     std::vector<std::vector<std::vector<std::int64_t>>> sub_paths,
                     std::vector<int> domains = {}) const {
        if (path.size() < 1) throw MappingError(edge + ": route needs at least one coordinate");
        if (sub_paths.size() + 1 != path.size()) {
            throw MappingError(edge + ": " + std::to_string(path.size()) +
                               " critical coordinates require " + std::to_string(path.size() - 1) +
                               " sub-paths, got " + std::to_string(sub_paths.size()));
        }
        Mapping m = *this;
        EdgeRoute r;
        r.edge = edge;
        r.path = std::move(path);
        r.sub_paths = std::move(sub_paths);
        r.domains = std::move(domains);
        m.edge_maps_[edge] = std::move(r);
        return m;
    }

    // --- synchronization ----------------------------------------------------

    Mapping sync(const std::string& sync_id, const std::vector<MultiLevelCoord>& coords,
                 const std::map<std::string, std::string>& after = {}) const {
        for (const auto& r : syncs_) {
            if (r.sync_id == sync_id && !r.generated)
                throw MappingError("sync id '" + sync_id + "' already used");
        }
        Mapping m = *this;
        SyncRecord rec;
        rec.sync_id = sync_id;
        rec.points = coords;
        rec.after = after;
        rec.seq = m.next_seq_++;
        m.syncs_.push_back(std::move(rec));
        return m;
    }

    Mapping set_time(const std::string& task, TimeCoord tc) const {
        Mapping m = *this;
        m.time_map_[task] = std::move(tc);
        return m;
    }

    Mapping add_group(const std::string& name, MappingGroup g) const {
        Mapping m = *this;
        m.groups_[name] = std::move(g);
        return m;
    }

    Mapping erase_node(const std::string& task) const {
        Mapping m = *this;
        m.node_map_.erase(task);
        m.place_seq_.erase(task);
        m.time_map_.erase(task);
        return m;
    }

    // --- accessors -----------------------------------------------------------

    const std::map<std::string, MultiLevelCoord>& node_map() const { return node_map_; }
    const std::map<std::string, EdgeRoute>& edge_maps() const { return edge_maps_; }
    const std::map<std::string, TimeCoord>& time_map() const { return time_map_; }
    const std::vector<SyncRecord>& syncs() const { return syncs_; }
    const std::map<std::string, MappingGroup>& groups() const { return groups_; }
    int placement_seq(const std::string& task) const {
        auto it = place_seq_.find(task);
        return it == place_seq_.end() ? -1 : it->second;
    }
    std::optional<MultiLevelCoord> placed_at(const std::string& task) const {
        auto it = node_map_.find(task);
        if (it == node_map_.end()) return std::nullopt;
        return it->second;
    }

    bool operator==(const Mapping& o) const {
        return node_map_ == o.node_map_ && time_map_keys_equal(o) && groups_keys_equal(o) &&
               edge_keys_equal(o) && sync_sig() == o.sync_sig();
    }

    // --- serialization -------------------------------------------------------

    nlohmann::ordered_json to_json() const;
    static Mapping from_json(const nlohmann::json& j);

private:
    std::map<std::string, MultiLevelCoord> node_map_;
    std::map<std::string, int> place_seq_;
    std::map<std::string, EdgeRoute> edge_maps_;
    std::map<std::string, TimeCoord> time_map_;
    std::vector<SyncRecord> syncs_;
    std::map<std::string, MappingGroup> groups_;
    int next_seq_ = 0;

    bool time_map_keys_equal(const Mapping& o) const {
        if (time_map_.size() != o.time_map_.size()) return false;
        for (const auto& [k, v] : time_map_) {
            auto it = o.time_map_.find(k);
            if (it == o.time_map_.end() || it->second.t != v.t) return false;
        }
        return true;
    }
    bool groups_keys_equal(const Mapping& o) const {
        if (groups_.size() != o.groups_.size()) return false;
        for (const auto& [k, v] : groups_) {
            auto it = o.groups_.find(k);
            if (it == o.groups_.end() || it->second.time_level != v.time_level ||
                !(it->second.members == v.members))
                return false;
        }
        return true;
    }
    bool edge_keys_equal(const Mapping& o) const {
        if (edge_maps_.size() != o.edge_maps_.size()) return false;
        for (const auto& [k, v] : edge_maps_) {
            auto it = o.edge_maps_.find(k);
            if (it == o.edge_maps_.end() || !(it->second.path == v.path) ||
                it->second.sub_paths != v.sub_paths || it->second.domains != v.domains)
                return false;
        }
        return true;
    }
    std::vector<std::string> sync_sig() const {
        std::vector<std::string> s;
        for (const auto& r : syncs_) {
            std::string e = r.sync_id + "|" + (r.generated ? "g" : "u");
            for (const auto& c : r.points) e += c.str();
            s.push_back(e);
        }
        std::sort(s.begin(), s.end());
        return s;
    }

    friend Mapping lower_time_coords(const Mapping&, const HardwareModel&);
};

// ---------------------------------------------------------------------------
// Route segment derivation.

namespace detail {

inline const SpaceMatrix& matrix_at(const HardwareModel& model, const MultiLevelCoord& prefix,
                                    const std::string& edge) {
    auto r = model.retrieve(prefix);
    if (const SpaceMatrix* const* m = std::get_if<const SpaceMatrix*>(&r)) return **m;
    throw MappingError(edge + ": coordinate " + prefix.str() + " is not a matrix");
}

inline std::vector<std::vector<std::int64_t>> auto_waypoints(const TopologySpec& spec,
                                                             const std::vector<std::int64_t>& dims,
                                                             std::vector<std::int64_t> from,
                                                             const std::vector<std::int64_t>& to) {
    std::vector<std::vector<std::int64_t>> wp{from};
    switch (spec.pattern) {
        case TopologyPattern::mesh2d:
        case TopologyPattern::torus2d:
        case TopologyPattern::torus3d:
        case TopologyPattern::ring: {
            bool wrap = spec.pattern != TopologyPattern::mesh2d;
            for (std::size_t dim = 0; dim < from.size(); ++dim) {
                while (from[dim] != to[dim]) {
                    from = detail::grid_step(from, dim, to[dim], dims[dim], wrap);
                    wp.push_back(from);
                }
            }
            break;
        }
        default:
            if (from != to) wp.push_back(to);
            break;
    }
    return wp;
}

}  // namespace detail

inline std::vector<RouteSegment> derive_segments(const HardwareModel& model, const EdgeRoute& r) {
    std::vector<RouteSegment> out;
    if (r.path.size() <= 1) return out;  // co-located endpoints: no segments
    for (std::size_t s = 0; s + 1 < r.path.size(); ++s) {
        const MultiLevelCoord& a = r.path[s];
        const MultiLevelCoord& b = r.path[s + 1];
        for (const auto* c : {&a, &b}) {
            if (!c->levels.empty() && c->levels.back().is_comm())
                throw MappingError(r.edge + ": route coordinate " + c->str() +
                                   " may not address a communication domain");
        }
        RouteSegment seg;
        bool from_fixed = false, to_fixed = false;
        std::vector<std::int64_t> from_idx, to_idx;
        if (a.depth() == b.depth() && a.prefix(a.depth() - 1) == b.prefix(b.depth() - 1)) {
            // sibling hop inside one matrix
            seg.owner = a.prefix(a.depth() - 1);
            from_idx = a.levels.back().idx;
            to_idx = b.levels.back().idx;
            from_fixed = to_fixed = true;
        } else if (b.depth() + 1 == a.depth() && a.prefix(b.depth()) == b) {
            // a exits the matrix addressed by b
            seg.owner = b;
            from_idx = a.levels.back().idx;
            from_fixed = true;
        } else if (a.depth() + 1 == b.depth() && b.prefix(a.depth()) == a) {
            // b enters the matrix addressed by a
            seg.owner = a;
            to_idx = b.levels.back().idx;
            to_fixed = true;
        } else {
            throw MappingError(r.edge + ": consecutive route coordinates " + a.str() + " and " +
                               b.str() + " must be siblings or differ by exactly one level");
        }
        const SpaceMatrix& owner = detail::matrix_at(model, seg.owner, r.edge);
        seg.domain = s < r.domains.size() ? r.domains[s] : 0;
        if (seg.domain < 0 || seg.domain >= (int)owner.comm_points.size()) {
            throw MappingError(r.edge + ": matrix '" + owner.name +
                               "' has no communication domain " + std::to_string(seg.domain));
        }
        seg.comm_coord = seg.owner.with(LevelIndex::comm(seg.domain));
        const SpacePoint& cp = owner.comm_points[seg.domain];
        seg.spec = *cp.topology;

        if (s < r.sub_paths.size() && !r.sub_paths[s].empty()) {
            seg.waypoints = r.sub_paths[s];
        } else if (from_fixed && to_fixed) {
            seg.waypoints = detail::auto_waypoints(seg.spec, owner.dims, from_idx, to_idx);
        } else {
            seg.waypoints = {from_fixed ? from_idx : to_idx};
        }
        if (from_fixed && seg.waypoints.front() != from_idx)
            throw MappingError(r.edge + ": sub-path " + std::to_string(s) +
                               " does not start at the route coordinate");
        if (to_fixed && seg.waypoints.back() != to_idx)
            throw MappingError(r.edge + ": sub-path " + std::to_string(s) +
                               " does not end at the route coordinate");
        try {
            seg.expansion = expand_waypoints(seg.spec, owner.dims, seg.waypoints);
        } catch (const RouteError& e) {
            throw MappingError(r.edge + ": sub-path " + std::to_string(s) + ": " + e.what());
        }
        out.push_back(std::move(seg));
    }
    return out;
}

// Default route between two placed endpoints: climb to the lowest common
// ancestor, cross as a sibling hop, descend.  Exit/entry sub-paths inject at
// the endpoint's own position; sibling hops walk dimension order.
inline EdgeRoute auto_route(const HardwareModel& model, const std::string& edge,
                            const MultiLevelCoord& src, const MultiLevelCoord& dst) {
    EdgeRoute r;
    r.edge = edge;
    r.auto_routed = true;
    std::size_t common = 0;
    while (common < src.depth() && common < dst.depth() &&
           src.levels[common] == dst.levels[common])
        ++common;
    if (src == dst) {
        r.path = {src};
        return r;
    }
    // both endpoints sit below the common matrix; the sibling hop happens at depth common+1
    for (std::size_t d = src.depth(); d >= common + 1; --d) r.path.push_back(src.prefix(d));
    for (std::size_t d = common + 1; d <= dst.depth(); ++d) r.path.push_back(dst.prefix(d));
    r.sub_paths.assign(r.path.size() - 1, {});
    derive_segments(model, r);  // validates; throws when a level lacks a comm domain
    return r;
}

// ---------------------------------------------------------------------------
// Time-coordinate lowering: per-point lexicographic ordering chains plus
// generated barriers over virtual groups wherever a time level above 1
// changes between queue-adjacent tasks.

struct OrderConstraint {
    std::string before;
    std::string after;
};

inline Mapping lower_time_coords(const Mapping& m, const HardwareModel& model) {
    Mapping out = m;
    // idempotent: regenerate from scratch
    out.syncs_.erase(std::remove_if(out.syncs_.begin(), out.syncs_.end(),
                                    [](const SyncRecord& r) { return r.generated; }),
                     out.syncs_.end());

    std::map<std::string, MappingGroup> groups;
    for (const auto& [name, g] : model.virtual_groups) {
        MappingGroup mg;
        mg.time_level = g.time_level;
        mg.members = g.group_members;
        groups[name] = mg;
    }
    for (const auto& [name, g] : out.groups_) {
        if (groups.count(name))
            throw MappingError("group '" + name + "' defined both in hardware and mapping");
        groups[name] = g;
    }

    // collect tupled tasks per point
    std::size_t arity = 0;
    std::map<std::string, std::vector<std::string>> by_point;  // coord str -> task ids
    std::map<std::string, MultiLevelCoord> point_coord;
    for (const auto& [task, tc] : out.time_map_) {
        auto it = out.node_map_.find(task);
        if (it == out.node_map_.end())
            throw MappingError(task + ": has a time coordinate but no placement");
        if (arity == 0) arity = tc.t.size();
        if (tc.t.size() != arity)
            throw MappingError(task + ": time coordinate arity differs from the rest of the mapping");
        by_point[it->second.str()].push_back(task);
        point_coord[it->second.str()] = it->second;
    }
    if (arity == 0) return out;

    auto group_of = [&](const MultiLevelCoord& pt, int level) -> const std::string* {
        const std::string* found = nullptr;
        for (const auto& [name, g] : groups) {
            if (g.time_level != level) continue;
            for (const auto& mcoord : g.members) {
                if (mcoord == pt) {
                    if (found)
                        throw MappingError("point " + pt.str() + " is in two virtual groups for time level " +
                                           std::to_string(level));
                    found = &name;
                }
            }
        }
        return found;
    };

    // barrier key -> (group name, level, boundary prefix)
    struct Boundary {
        std::string group;
        int level;
        std::vector<std::int64_t> prefix;
    };
    std::map<std::string, Boundary> boundaries;

    for (auto& [pstr, tasks] : by_point) {
        std::stable_sort(tasks.begin(), tasks.end(), [&](const std::string& x, const std::string& y) {
            return out.time_map_.at(x).t < out.time_map_.at(y).t;
        });
        for (std::size_t i = 0; i + 1 < tasks.size(); ++i) {
            const auto& ta = out.time_map_.at(tasks[i]).t;
            const auto& tb = out.time_map_.at(tasks[i + 1]).t;
            for (std::size_t j = 0; j + 1 < arity; ++j) {  // every level above 1
                if (ta[j] == tb[j]) continue;
                int level = (int)(arity - j);
                const std::string* gname = group_of(point_coord[pstr], level);
                if (!gname)
                    throw MappingError(tasks[i + 1] + ": time level " + std::to_string(level) +
                                       " changes at " + pstr +
                                       " but the point is in no virtual group for that level");
                std::vector<std::int64_t> prefix(tb.begin(), tb.begin() + j + 1);
                std::string key = "@time/" + *gname + "/L" + std::to_string(level) + "/";
                for (auto v : prefix) key += std::to_string(v) + ",";
                boundaries[key] = Boundary{*gname, level, prefix};
            }
        }
    }

    for (const auto& [key, bd] : boundaries) {
        const MappingGroup& g = groups.at(bd.group);
        SyncRecord rec;
        rec.sync_id = key;
        rec.generated = true;
        std::size_t plen = bd.prefix.size();
        for (const auto& mcoord : g.members) {
            auto it = by_point.find(mcoord.str());
            if (it == by_point.end()) continue;  // no tupled tasks on this member
            SyncMember sm;
            sm.coord = mcoord;
            for (const auto& task : it->second) {
                const auto& t = out.time_map_.at(task).t;
                std::vector<std::int64_t> tp(t.begin(), t.begin() + plen);
                if (tp < bd.prefix) {
                    sm.wait_for.push_back(task);
                } else {
                    sm.gates.push_back(task);
                }
            }
            rec.points.push_back(mcoord);
            rec.members.push_back(std::move(sm));
        }
        out.syncs_.push_back(std::move(rec));
    }
    return out;
}

// Per-point lexicographic execution-order constraints among tupled tasks.
inline std::vector<OrderConstraint> time_order_constraints(const Mapping& m) {
    std::map<std::string, std::vector<std::string>> by_point;
    for (const auto& [task, tc] : m.time_map()) {
        auto at = m.placed_at(task);
        if (!at) continue;
        by_point[at->str()].push_back(task);
    }
    std::vector<OrderConstraint> out;
    for (auto& [pstr, tasks] : by_point) {
        std::stable_sort(tasks.begin(), tasks.end(), [&](const std::string& x, const std::string& y) {
            return m.time_map().at(x).t < m.time_map().at(y).t;
        });
        for (std::size_t i = 0; i + 1 < tasks.size(); ++i)
            out.push_back({tasks[i], tasks[i + 1]});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Validation.

inline bool kind_compatible(TaskKind t, PointKind p) {
    switch (t) {
        case TaskKind::compute: return p == PointKind::compute;
        case TaskKind::storage: return p == PointKind::memory;
        case TaskKind::sync: return p != PointKind::absent;
        case TaskKind::communication: return false;  // placed via routes
    }
    return false;
}

inline std::vector<Diag> validate_mapping(const Mapping& m, const TaskGraph& g,
                                          const HardwareModel& model) {
    std::vector<Diag> out;
    for (const Task& t : g.tasks()) {
        if (t.kind == TaskKind::communication) {
            auto it = m.edge_maps().find(t.id);
            if (it == m.edge_maps().end()) {
                bool src_ok = true, dst_ok = true;
                for (const auto& p : g.preds_of(t.id)) src_ok &= m.placed_at(p).has_value();
                for (const auto& c : g.succs_of(t.id)) dst_ok &= m.placed_at(c).has_value();
                if (!(src_ok && dst_ok))
                    out.push_back({t.id, "communication task unplaced and endpoints unplaced"});
                // otherwise auto-routable later: not an error
                continue;
            }
            try {
                auto segs = derive_segments(model, it->second);
                for (const auto& seg : segs) {
                    const SpacePoint& cp = model.point_at(seg.comm_coord);
                    if (cp.kind != PointKind::communication)
                        out.push_back({t.id, "segment lands on non-communication point"});
                }
                if (!it->second.path.empty()) {
                    for (const auto& p : g.preds_of(t.id)) {
                        auto at = m.placed_at(p);
                        if (at && !(*at == it->second.path.front()))
                            out.push_back({t.id, "route start " + it->second.path.front().str() +
                                                     " differs from producer '" + p +
                                                     "' placement " + at->str()});
                    }
                    for (const auto& c : g.succs_of(t.id)) {
                        auto at = m.placed_at(c);
                        if (at && !(*at == it->second.path.back()))
                            out.push_back({t.id, "route end " + it->second.path.back().str() +
                                                     " differs from consumer '" + c +
                                                     "' placement " + at->str()});
                    }
                }
            } catch (const std::exception& e) {
                out.push_back({t.id, e.what()});
            }
            continue;
        }
        auto at = m.placed_at(t.id);
        if (!at) {
            bool in_sync = false;
            if (t.kind == TaskKind::sync) {
                for (const auto& r : m.syncs()) in_sync |= (r.sync_id == t.sync_id);
            }
            if (!in_sync) out.push_back({t.id, "task not placed"});
            continue;
        }
        try {
            const SpacePoint& p = model.point_at(*at);
            if (!kind_compatible(t.kind, p.kind))
                out.push_back({t.id, std::string(to_string(t.kind)) + " task placed on " +
                                         to_string(p.kind) + " point " + at->str()});
        } catch (const std::exception& e) {
            out.push_back({t.id, e.what()});
        }
    }
    // static capacity: storage tasks with no producers live for the whole run
    std::map<std::string, std::int64_t> always_live;
    std::map<std::string, const SpacePoint*> mem_points;
    for (const Task& t : g.tasks()) {
        if (t.kind != TaskKind::storage) continue;
        auto at = m.placed_at(t.id);
        if (!at) continue;
        if (!g.preds_of(t.id).empty()) continue;
        try {
            const SpacePoint& p = model.point_at(*at);
            if (p.kind != PointKind::memory) continue;
            always_live[at->str()] += t.size;
            mem_points[at->str()] = &p;
        } catch (const std::exception&) {
        }
    }
    for (const auto& [coord, total] : always_live) {
        Rat cap = mem_points[coord]->param_or("capacity", 0);
        if (cap > 0 && Rat(total) > cap)
            out.push_back({coord, "always-live storage " + std::to_string(total) +
                                      " bytes exceeds capacity " + rat_str(cap)});
    }
    for (const auto& rec : m.syncs()) {
        for (const auto& c : rec.points) {
            try {
                model.point_at(c);
            } catch (const std::exception& e) {
                out.push_back({"sync:" + rec.sync_id, e.what()});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Mapping file IO (section order preserved; file order is queue order).

inline nlohmann::ordered_json Mapping::to_json() const {
    nlohmann::ordered_json j;
    std::vector<std::pair<int, std::string>> ordered;
    for (const auto& [task, coord] : node_map_) ordered.push_back({placement_seq(task), task});
    std::sort(ordered.begin(), ordered.end());
    j["nodes"] = nlohmann::ordered_json::object();
    for (const auto& [seq, task] : ordered) j["nodes"][task] = node_map_.at(task).str();
    j["edges"] = nlohmann::ordered_json::object();
    for (const auto& [edge, r] : edge_maps_) {
        nlohmann::ordered_json ej;
        ej["path"] = nlohmann::ordered_json::array();
        for (const auto& c : r.path) ej["path"].push_back(c.str());
        ej["sub_paths"] = r.sub_paths;
        if (!r.domains.empty()) ej["domain"] = r.domains;
        j["edges"][edge] = std::move(ej);
    }
    j["sync"] = nlohmann::ordered_json::object();
    for (const auto& rec : syncs_) {
        if (rec.generated) continue;
        nlohmann::ordered_json sj;
        sj["coords"] = nlohmann::ordered_json::array();
        for (const auto& c : rec.points) sj["coords"].push_back(c.str());
        if (!rec.after.empty()) sj["after"] = rec.after;
        j["sync"][rec.sync_id] = std::move(sj);
    }
    j["time"] = nlohmann::ordered_json::object();
    for (const auto& [task, tc] : time_map_) j["time"][task] = tc.t;
    j["groups"] = nlohmann::ordered_json::object();
    for (const auto& [name, g] : groups_) {
        nlohmann::ordered_json gj;
        gj["level"] = g.time_level;
        gj["members"] = nlohmann::ordered_json::array();
        for (const auto& c : g.members) gj["members"].push_back(c.str());
        j["groups"][name] = std::move(gj);
    }
    return j;
}

inline Mapping Mapping::from_json(const nlohmann::json& j) {
    Mapping m;
    if (j.contains("nodes")) {
        for (const auto& [task, coord] : j.at("nodes").items())
            m = m.map_node(task, MultiLevelCoord::parse(coord.get<std::string>()));
    }
    if (j.contains("edges")) {
        for (const auto& [edge, ej] : j.at("edges").items()) {
            std::vector<MultiLevelCoord> path;
            for (const auto& c : ej.at("path")) path.push_back(MultiLevelCoord::parse(c.get<std::string>()));
            std::vector<std::vector<std::vector<std::int64_t>>> subs;
            if (ej.contains("sub_paths"))
                subs = ej.at("sub_paths").get<std::vector<std::vector<std::vector<std::int64_t>>>>();
            else
                subs.assign(path.size() > 0 ? path.size() - 1 : 0, {});
            std::vector<int> dom;
            if (ej.contains("domain")) dom = ej.at("domain").get<std::vector<int>>();
            m = m.map_edge(edge, std::move(path), std::move(subs), std::move(dom));
        }
    }
    if (j.contains("sync")) {
        for (const auto& [sid, sj] : j.at("sync").items()) {
            std::vector<MultiLevelCoord> coords;
            for (const auto& c : sj.at("coords")) coords.push_back(MultiLevelCoord::parse(c.get<std::string>()));
            std::map<std::string, std::string> after;
            if (sj.contains("after")) after = sj.at("after").get<std::map<std::string, std::string>>();
            m = m.sync(sid, coords, after);
        }
    }
    if (j.contains("time")) {
        for (const auto& [task, tj] : j.at("time").items()) {
            TimeCoord tc;
            tc.t = tj.get<std::vector<std::int64_t>>();
            m = m.set_time(task, std::move(tc));
        }
    }
    if (j.contains("groups")) {
        for (const auto& [name, gj] : j.at("groups").items()) {
            MappingGroup g;
            if (gj.contains("level")) g.time_level = gj.at("level").get<int>();
            for (const auto& c : gj.at("members")) g.members.push_back(MultiLevelCoord::parse(c.get<std::string>()));
            m = m.add_group(name, std::move(g));
        }
    }
    return m;
}

inline Mapping load_mapping(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw MappingError(file + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw MappingError(file + ": " + e.what());
    }
    return Mapping::from_json(j);
}

inline void save_mapping(const Mapping& m, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw MappingError(file + ": cannot open for writing");
    out << m.to_json().dump(2) << "\n";
}

}  // namespace strata
