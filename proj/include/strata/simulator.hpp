// Task-level event-driven simulation with a hardware-consistent dynamic
// scheduler.
//
// The mapped graph lowers to instances on points.  Points serialize their
// queues; independent tasks that share physical links co-run in contention
// episodes under an equal-split fluid model, truncating every unfinished
// member whenever the earliest member completes.  Evaluated results stay
// staged in a commit buffer: a result commits only once nothing unevaluated
// could still overlap it, and rolls back (with exact undo of fired ticks and
// timer effects) whenever a later activation reveals an overlap.  With the
// consistency machinery disabled ("naive" mode) results commit immediately,
// reproducing contention-blind dependency-order schedules.

#pragma once

#include "strata/evaluators.hpp"
#include "strata/hardware.hpp"
#include "strata/mapping.hpp"
#include "strata/task_graph.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace strata {

struct SimError : std::runtime_error {
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Lowered graph: one node per schedulable unit (task or route segment).

struct SimNode {
    std::string label;   // origin or origin[segment]
    std::string origin;  // original task id ("" for generated sync members)
    int segment = -1;
    int num_segments = 1;
    TaskKind kind = TaskKind::compute;
    int point = -1;  // flat point id; -1 = dissolved (co-located endpoints)
    bool iterable = true;

    // evaluation profile
    bool fluid = false;        // transfer through shared links
    Rat work = 0;              // fluid: bytes; fixed: duration in cycles
    Rat base_rate = 1;         // fluid solo rate (link bandwidth)
    std::vector<int> links;    // global link ids occupied while transferring
    std::int64_t latency = 0;  // lead-in cycles before transfer starts

    std::string barrier;         // non-empty: joint-release barrier key
    std::int64_t mem_bytes = 0;  // storage occupancy
};

struct LoweredGraph {
    std::vector<SimNode> nodes;
    std::vector<std::pair<int, int>> edges;  // (src node, dst node)
    std::vector<std::vector<int>> in_edges;  // node -> edge ids
    std::vector<std::vector<int>> out_edges;
    std::map<std::string, std::vector<int>> barriers;  // key -> node ids
    std::vector<std::string> link_names;               // link id -> "point coord|key"
    std::map<std::string, int> node_by_label;
    std::vector<std::vector<int>> nodes_on_point;  // flat point id -> node ids
    std::vector<bool> point_shared;                // links present: contention possible

    int node_id(const std::string& label) const {
        auto it = node_by_label.find(label);
        if (it == node_by_label.end()) throw SimError("unknown lowered node '" + label + "'");
        return it->second;
    }
};

namespace detail {

inline void add_sim_edge(LoweredGraph& g, std::set<std::pair<int, int>>& seen, int src, int dst) {
    if (src == dst) return;
    if (!seen.insert({src, dst}).second) return;
    g.edges.push_back({src, dst});
}

}  // namespace detail

inline LoweredGraph lower(const HardwareModel& model, const TaskGraph& graph,
                          const Mapping& mapping_in,
                          const EvaluatorRegistry& registry = EvaluatorRegistry::builtin()) {
    Mapping mapping = lower_time_coords(mapping_in, model);
    LoweredGraph g;
    std::map<std::string, int> link_ids;
    auto link_of = [&](int point, const std::string& key) {
        std::string name = model.point_table[point].coord.str() + "|" + key;
        auto it = link_ids.find(name);
        if (it != link_ids.end()) return it->second;
        int id = (int)g.link_names.size();
        g.link_names.push_back(name);
        link_ids[name] = id;
        return id;
    };
    auto add_node = [&](SimNode n) {
        int id = (int)g.nodes.size();
        if (!g.node_by_label.emplace(n.label, id).second)
            throw SimError("duplicate lowered node label '" + n.label + "'");
        g.nodes.push_back(std::move(n));
        return id;
    };

    std::map<std::string, int> first_of, last_of;
    std::set<std::pair<int, int>> seen_edges;

    for (const Task& t : graph.tasks()) {
        if (t.kind == TaskKind::communication) {
            EdgeRoute route;
            auto it = mapping.edge_maps().find(t.id);
            if (it != mapping.edge_maps().end()) {
                route = it->second;
            } else {
                auto preds = graph.preds_of(t.id);
                auto succs = graph.succs_of(t.id);
                if (preds.empty() || succs.empty())
                    throw SimError(t.id +
                                   ": communication task needs a producer and a consumer or an explicit route");
                auto src = mapping.placed_at(preds.front());
                auto dst = mapping.placed_at(succs.front());
                if (!src || !dst) throw SimError(t.id + ": cannot auto-route, endpoints unplaced");
                route = auto_route(model, t.id, *src, *dst);
            }
            auto segs = derive_segments(model, route);
            if (segs.empty()) {
                SimNode n;
                n.label = t.id;
                n.origin = t.id;
                n.kind = TaskKind::communication;
                n.point = -1;  // co-located endpoints: zero-cost forwarder
                n.iterable = t.iterable;
                int id = add_node(std::move(n));
                first_of[t.id] = last_of[t.id] = id;
                continue;
            }
            int prev = -1;
            for (std::size_t s = 0; s < segs.size(); ++s) {
                const RouteSegment& seg = segs[s];
                int pid = model.point_id(seg.comm_coord);
                const SpacePoint& cp = model.point_table[pid].point;
                SimNode n;
                n.label = segs.size() == 1 ? t.id : t.id + "[" + std::to_string(s) + "]";
                n.origin = t.id;
                n.segment = (int)s;
                n.num_segments = (int)segs.size();
                n.kind = TaskKind::communication;
                n.point = pid;
                n.iterable = t.iterable;
                if (cp.evaluator == "link") {
                    n.fluid = true;
                    n.work = Rat(t.volume);
                    n.base_rate = seg.spec.link_bandwidth;
                    n.latency = seg.expansion.hops * seg.spec.hop_latency;
                    for (const auto& key : seg.expansion.links) n.links.push_back(link_of(pid, key));
                } else {
                    const Evaluator& ev = registry.get(cp.evaluator);
                    if (!ev.applicable().count(TaskKind::communication))
                        throw SimError(t.id + ": evaluator '" + cp.evaluator + "' bound to " + cp.id +
                                       " cannot evaluate communication tasks");
                    try {
                        n.work = ev.duration(cp, t);
                    } catch (const std::exception& e) {
                        throw SimError(t.id + ": " + e.what());
                    }
                }
                int id = add_node(std::move(n));
                if (s == 0) first_of[t.id] = id;
                if (prev >= 0) detail::add_sim_edge(g, seen_edges, prev, id);
                prev = id;
            }
            last_of[t.id] = prev;
            continue;
        }

        auto at = mapping.placed_at(t.id);
        if (!at) throw SimError(t.id + ": task not placed");
        int pid = model.point_id(*at);
        const SpacePoint& pt = model.point_table[pid].point;
        if (!kind_compatible(t.kind, pt.kind))
            throw SimError(t.id + ": " + to_string(t.kind) + " task placed on " + to_string(pt.kind) +
                           " point " + at->str());
        SimNode n;
        n.label = t.id;
        n.origin = t.id;
        n.kind = t.kind;
        n.point = pid;
        n.iterable = t.iterable;
        if (t.kind == TaskKind::compute) {
            const Evaluator& ev = registry.get(pt.evaluator);
            if (!ev.applicable().count(TaskKind::compute))
                throw SimError(t.id + ": evaluator '" + pt.evaluator + "' cannot evaluate compute tasks");
            try {
                n.work = ev.duration(pt, t);
            } catch (const std::exception& e) {
                throw SimError(t.id + ": " + e.what());
            }
            if (pt.param_or("sharing", 0) != 0) {
                n.fluid = true;
                n.base_rate = 1;
                n.links.push_back(link_of(pid, "core"));
            }
        } else if (t.kind == TaskKind::storage) {
            n.mem_bytes = t.size;
        } else if (t.kind == TaskKind::sync) {
            n.barrier = "task:" + t.sync_id;
        }
        int id = add_node(std::move(n));
        first_of[t.id] = last_of[t.id] = id;
    }

    for (const Dependency& d : graph.deps())
        detail::add_sim_edge(g, seen_edges, last_of.at(d.src), first_of.at(d.dst));

    for (const OrderConstraint& oc : time_order_constraints(mapping))
        detail::add_sim_edge(g, seen_edges, last_of.at(oc.before), first_of.at(oc.after));

    for (const SyncRecord& rec : mapping.syncs()) {
        std::string key = "rec:" + rec.sync_id;
        if (!rec.members.empty()) {
            for (const SyncMember& sm : rec.members) {
                SimNode n;
                n.label = "@" + rec.sync_id + "@" + sm.coord.str();
                n.kind = TaskKind::sync;
                n.point = model.point_id(sm.coord);
                n.barrier = key;
                int id = add_node(std::move(n));
                for (const auto& task : sm.wait_for)
                    detail::add_sim_edge(g, seen_edges, last_of.at(task), id);
                for (const auto& task : sm.gates)
                    detail::add_sim_edge(g, seen_edges, id, first_of.at(task));
            }
            continue;
        }
        for (const MultiLevelCoord& c : rec.points) {
            int pid = model.point_id(c);
            SimNode n;
            n.label = "@" + rec.sync_id + "@" + c.str();
            n.kind = TaskKind::sync;
            n.point = pid;
            n.barrier = key;
            int id = add_node(std::move(n));
            double pos = (double)rec.seq;
            auto after_it = rec.after.find(c.str());
            if (after_it != rec.after.end()) {
                int s = mapping.placement_seq(after_it->second);
                if (s < 0)
                    throw SimError("sync '" + rec.sync_id + "': after-task '" + after_it->second +
                                   "' is not placed");
                pos = s + 0.5;
            }
            for (const auto& [task, coord] : mapping.node_map()) {
                if (!(coord == c) || !graph.has_task(task)) continue;
                int s = mapping.placement_seq(task);
                if ((double)s < pos)
                    detail::add_sim_edge(g, seen_edges, last_of.at(task), id);
                else
                    detail::add_sim_edge(g, seen_edges, id, first_of.at(task));
            }
        }
    }

    for (int i = 0; i < (int)g.nodes.size(); ++i)
        if (!g.nodes[i].barrier.empty()) g.barriers[g.nodes[i].barrier].push_back(i);

    g.in_edges.assign(g.nodes.size(), {});
    g.out_edges.assign(g.nodes.size(), {});
    for (int e = 0; e < (int)g.edges.size(); ++e) {
        g.out_edges[g.edges[e].first].push_back(e);
        g.in_edges[g.edges[e].second].push_back(e);
    }

    {
        std::vector<int> indeg(g.nodes.size(), 0);
        for (auto& [s, d] : g.edges) indeg[d]++;
        std::vector<int> q;
        for (int i = 0; i < (int)g.nodes.size(); ++i)
            if (!indeg[i]) q.push_back(i);
        std::size_t done = 0;
        while (!q.empty()) {
            int u = q.back();
            q.pop_back();
            ++done;
            for (int e : g.out_edges[u])
                if (--indeg[g.edges[e].second] == 0) q.push_back(g.edges[e].second);
        }
        if (done != g.nodes.size()) {
            std::string stuck;
            for (int i = 0; i < (int)g.nodes.size(); ++i)
                if (indeg[i]) stuck += (stuck.empty() ? "" : ", ") + g.nodes[i].label;
            throw SimError("ordering constraints create a cycle among: " + stuck);
        }
    }

    g.nodes_on_point.assign(model.point_table.size(), {});
    for (int i = 0; i < (int)g.nodes.size(); ++i)
        if (g.nodes[i].point >= 0) g.nodes_on_point[g.nodes[i].point].push_back(i);
    g.point_shared.assign(model.point_table.size(), false);
    for (int i = 0; i < (int)g.nodes.size(); ++i)
        if (g.nodes[i].point >= 0 && !g.nodes[i].links.empty()) g.point_shared[g.nodes[i].point] = true;
    return g;
}

// ---------------------------------------------------------------------------
// Results.

struct TraceRow {
    std::string label;
    std::string point;
    int iteration = 0;
    int fragment = 1;
    int fragments = 1;
    Rat start, end, work;
    std::string status = "committed";
};

struct MemoryStat {
    std::string point;
    std::int64_t peak = 0;
    Rat capacity = 0;
};

struct StorageLifetime {
    std::string label;
    std::string point;
    int iteration = 0;
    std::int64_t bytes = 0;
    Rat start, end;
    bool leaked = false;  // never consumed; survives to simulation end
};

struct SimulationResult {
    bool ok = false;
    std::string error;
    Rat makespan = 0;
    std::vector<TraceRow> trace;
    std::vector<StorageLifetime> storage;
    std::map<std::string, Rat> completion;       // origin task -> final end
    std::map<std::string, Rat> utilization;      // point coord -> busy fraction
    std::map<std::string, Rat> link_contention;  // link name -> contended time
    std::vector<MemoryStat> memory;
    std::vector<std::string> violations;

    Rat completion_of(const std::string& task) const {
        auto it = completion.find(task);
        if (it == completion.end()) throw SimError("no completion recorded for '" + task + "'");
        return it->second;
    }
};

struct SimOptions {
    int iterations = 1;
    bool naive = false;  // disable commit/rollback consistency machinery
    bool check_invariants = true;
    std::map<std::string, Rat> input_time;  // external tick per source task (default 0)
};

// Start/end of one evaluation round from input tick timestamps and the point
// timer.
inline std::pair<Rat, Rat> eval_start_end(const std::vector<Rat>& ticks, const Rat& t_current,
                                          const Rat& duration) {
    Rat start = t_current;
    for (const Rat& t : ticks) start = std::max(start, t);
    return {start, start + duration};
}

// ---------------------------------------------------------------------------
// Engine.

class Engine {
public:
    Engine(const HardwareModel& model, const LoweredGraph& g, SimOptions opt)
        : model_(model), g_(g), opt_(std::move(opt)), N_((int)g.nodes.size()),
          I_(std::max(1, opt_.iterations)) {}

    SimulationResult run() {
        init();
        std::int64_t budget = (std::int64_t)N_ * I_ * 4000 + 20000;
        while (true) {
            if (--budget < 0) throw SimError("scheduler failed to converge (internal error)");
            if (process_immediates()) continue;
            if (evaluate_barriers()) continue;
            if (!opt_.naive && apply_trigger_or_join()) continue;
            if (apply_commits()) continue;
            if (advance_one()) continue;
            break;
        }
        return finalize();
    }

private:
    const HardwareModel& model_;
    const LoweredGraph& g_;
    SimOptions opt_;
    int N_, I_;

    struct Frag {
        Rat start, end, work;
        bool committed = false;
    };

    struct Inst {
        std::optional<Rat> start;  // established at admission
        bool complete = false;     // all work evaluated (possibly uncommitted)
        std::vector<Frag> frags;
        Rat done = 0;
        int episode = -1;
        int admit_seq = -1;
        int missing = 0;        // input edges lacking a tick
        bool processed = false; // storage / forwarder bookkeeping done
    };

    struct Episode {
        int point = -1;
        std::vector<int> members;
    };

    std::vector<std::vector<std::optional<Rat>>> tick_;  // per edge, per producer iteration
    std::vector<Inst> inst_;
    std::vector<Episode> episodes_;
    std::vector<int> open_episode_;  // per point
    std::vector<Rat> committed_timer_;
    std::vector<std::pair<Rat, int>> trigger_queue_;  // (tau, point)
    int admit_counter_ = 0;
    std::set<std::pair<std::string, int>> evaluated_barriers_;

    int iid(int node, int iter) const { return iter * N_ + node; }
    int node_of(int i) const { return i % N_; }
    int iter_of(int i) const { return i / N_; }
    int producer_iter(int pnode, int citer) const { return g_.nodes[pnode].iterable ? citer : 0; }
    bool instance_exists(int node, int iter) const { return g_.nodes[node].iterable || iter == 0; }

    void init() {
        int P = (int)model_.point_table.size();
        inst_.assign((std::size_t)N_ * I_, Inst{});
        tick_.assign(g_.edges.size(), std::vector<std::optional<Rat>>(I_));
        committed_timer_.assign(P, Rat(0));
        open_episode_.assign(P, -1);
        for (int n = 0; n < N_; ++n)
            for (int k = 0; k < I_; ++k)
                if (instance_exists(n, k)) inst_[iid(n, k)].missing = (int)g_.in_edges[n].size();
    }

    std::optional<Rat> tick_at(int e, int citer) const {
        return tick_[e][producer_iter(g_.edges[e].first, citer)];
    }

    bool activated(int i) const {
        return instance_exists(node_of(i), iter_of(i)) && inst_[i].missing == 0;
    }

    Rat external_time(int n) const {
        auto it = opt_.input_time.find(g_.nodes[n].origin);
        return it == opt_.input_time.end() ? Rat(0) : it->second;
    }

    Rat max_input_tick(int i) const {
        int n = node_of(i), k = iter_of(i);
        Rat t = external_time(n);
        for (int e : g_.in_edges[n]) {
            auto ts = tick_at(e, k);
            if (ts) t = std::max(t, *ts);
        }
        return t;
    }

    Rat min_input_tick(int i) const {
        int n = node_of(i), k = iter_of(i);
        if (g_.in_edges[n].empty()) return external_time(n);
        bool any = false;
        Rat t = 0;
        for (int e : g_.in_edges[n]) {
            auto ts = tick_at(e, k);
            if (ts && (!any || *ts < t)) {
                t = *ts;
                any = true;
            }
        }
        return t;
    }

    // --- ticks ---

    void fire_outputs(int i, const Rat& at) {
        int n = node_of(i), k = iter_of(i);
        for (int e : g_.out_edges[n]) {
            if (tick_[e][k].has_value())
                throw SimError("tick refired without rollback (internal error)");
            tick_[e][k] = at;
            int dst = g_.edges[e].second;
            for (int ck = 0; ck < I_; ++ck) {
                if (!instance_exists(dst, ck) || producer_iter(n, ck) != k) continue;
                if (--inst_[iid(dst, ck)].missing < 0)
                    throw SimError("tick accounting underflow (internal error)");
            }
        }
    }

    void unfire_outputs(int i) {
        int n = node_of(i), k = iter_of(i);
        for (int e : g_.out_edges[n]) {
            if (!tick_[e][k].has_value()) continue;
            tick_[e][k].reset();
            int dst = g_.edges[e].second;
            for (int ck = 0; ck < I_; ++ck) {
                if (!instance_exists(dst, ck) || producer_iter(n, ck) != k) continue;
                int ci = iid(dst, ck);
                inst_[ci].missing++;
                if (touched(ci)) full_reset(ci);
            }
        }
    }

    bool touched(int i) const {
        const Inst& x = inst_[i];
        return x.start.has_value() || x.complete || x.processed || !x.frags.empty();
    }

    // --- rollback ---

    void assert_uncommitted(int i) const {
        for (const Frag& f : inst_[i].frags)
            if (f.committed)
                throw SimError("rollback of a committed result for " + g_.nodes[node_of(i)].label +
                               " (internal invariant violation)");
    }

    void full_reset(int i) {
        if (!touched(i)) return;
        assert_uncommitted(i);
        Inst& x = inst_[i];
        int n = node_of(i);
        std::optional<Rat> old_start = x.start;
        int ep = x.episode;
        bool had_fired = x.complete || x.processed;
        x.frags.clear();
        x.done = 0;
        x.complete = false;
        x.processed = false;
        x.start.reset();
        x.episode = -1;
        x.admit_seq = -1;
        if (ep >= 0) drop_from_episode(ep, i);
        if (had_fired) unfire_outputs(i);
        if (!g_.nodes[n].barrier.empty()) {
            evaluated_barriers_.erase({g_.nodes[n].barrier, iter_of(i)});
            for (int m : g_.barriers.at(g_.nodes[n].barrier)) {
                if (m == n || !instance_exists(m, iter_of(i))) continue;
                int mi = iid(m, iter_of(i));
                if (touched(mi)) full_reset(mi);
            }
        }
        if (old_start && g_.nodes[n].point >= 0 && g_.nodes[n].kind != TaskKind::storage)
            trigger_queue_.push_back({*old_start, g_.nodes[n].point});
    }

    void drop_from_episode(int ep, int i) {
        auto& mem = episodes_[ep].members;
        mem.erase(std::remove(mem.begin(), mem.end(), i), mem.end());
        if (mem.empty() && open_episode_[episodes_[ep].point] == ep)
            open_episode_[episodes_[ep].point] = -1;
    }

    // Withdraw every uncommitted evaluation on point p that reaches past tau.
    void withdraw_point(int p, const Rat& tau) {
        bool again = true;
        while (again) {
            again = false;
            for (int n : g_.nodes_on_point[p]) {
                if (g_.nodes[n].kind == TaskKind::storage) continue;
                for (int k = 0; k < I_; ++k) {
                    if (!instance_exists(n, k)) continue;
                    int i = iid(n, k);
                    Inst& x = inst_[i];
                    bool affects = false;
                    for (const Frag& f : x.frags)
                        if (f.end > tau) affects = true;
                    if (!affects) continue;
                    for (const Frag& f : x.frags)
                        if (f.end > tau && f.committed)
                            throw SimError("committed result of " + g_.nodes[n].label +
                                           " overlaps a later activation (internal invariant violation)");
                    if (!g_.nodes[n].barrier.empty()) {
                        full_reset(i);
                        again = true;
                        continue;
                    }
                    std::vector<Frag> kept;
                    for (const Frag& f : x.frags)
                        if (f.end <= tau) kept.push_back(f);
                    if (kept.empty() && (!x.start || *x.start >= tau)) {
                        full_reset(i);
                        again = true;
                        continue;
                    }
                    bool had_fired = x.complete;
                    x.frags = std::move(kept);
                    x.done = 0;
                    for (const Frag& f : x.frags) x.done += f.work;
                    x.complete = false;
                    if (had_fired) unfire_outputs(i);
                    // resumes inside its episode; any later episode on p must clear out
                    if (x.episode >= 0 && open_episode_[p] != x.episode) {
                        if (open_episode_[p] >= 0) {
                            std::vector<int> others = episodes_[open_episode_[p]].members;
                            for (int m : others) full_reset(m);
                        }
                        open_episode_[p] = x.episode;
                    }
                    again = true;
                }
            }
        }
    }

    bool drain_triggers() {
        bool any = false;
        while (!trigger_queue_.empty()) {
            std::sort(trigger_queue_.begin(), trigger_queue_.end(),
                      [](const auto& a, const auto& b) {
                          return a.first != b.first ? a.first < b.first : a.second < b.second;
                      });
            auto [tau, p] = trigger_queue_.front();
            trigger_queue_.erase(trigger_queue_.begin());
            withdraw_point(p, tau);
            any = true;
        }
        return any;
    }

    // --- storage and dissolved forwarders ---

    bool process_immediates() {
        bool any = false;
        for (int n = 0; n < N_; ++n) {
            const SimNode& nd = g_.nodes[n];
            if (!(nd.kind == TaskKind::storage || nd.point < 0)) continue;
            for (int k = 0; k < I_; ++k) {
                if (!instance_exists(n, k)) continue;
                int i = iid(n, k);
                Inst& x = inst_[i];
                if (x.processed || !activated(i)) continue;
                Rat avail = max_input_tick(i);
                x.processed = true;
                x.start = (nd.kind == TaskKind::storage) ? min_input_tick(i) : avail;
                x.frags.push_back({*x.start, avail, 0, false});
                fire_outputs(i, avail);
                any = true;
            }
        }
        return any;
    }

    // --- barriers: joint release at the group-wide max start ---

    bool evaluate_barriers() {
        bool any = false;
        for (const auto& [key, members] : g_.barriers) {
            for (int k = 0; k < I_; ++k) {
                if (evaluated_barriers_.count({key, k})) continue;
                bool ready = true;
                for (int n : members) {
                    if (!instance_exists(n, k)) continue;
                    int i = iid(n, k);
                    if (!activated(i) || inst_[i].complete) ready = false;
                }
                if (!ready) continue;
                Rat release = 0;
                std::vector<std::pair<int, Rat>> starts;
                for (int n : members) {
                    if (!instance_exists(n, k)) continue;
                    int i = iid(n, k);
                    Rat s = std::max(max_input_tick(i), point_floor(g_.nodes[n].point));
                    starts.push_back({i, s});
                    release = std::max(release, s);
                }
                for (auto& [i, s] : starts) {
                    Inst& x = inst_[i];
                    x.start = s;
                    x.complete = true;
                    x.frags.push_back({release, release, 0, false});
                    x.admit_seq = admit_counter_++;
                    fire_outputs(i, release);
                }
                evaluated_barriers_.insert({key, k});
                any = true;
            }
        }
        return any;
    }

    // --- floors and potential starts ---

    // latest evaluated (committed or staged) end on p
    Rat point_floor(int p) const {
        if (p < 0) return 0;
        Rat f = committed_timer_[p];
        for (int n : g_.nodes_on_point[p]) {
            if (g_.nodes[n].kind == TaskKind::storage) continue;
            for (int k = 0; k < I_; ++k) {
                if (!instance_exists(n, k)) continue;
                for (const Frag& fr : inst_[iid(n, k)].frags) f = std::max(f, fr.end);
            }
        }
        return f;
    }

    bool shares_links(int na, int nb) const {
        for (int a : g_.nodes[na].links)
            for (int b : g_.nodes[nb].links)
                if (a == b) return true;
        return false;
    }

    // start a pending instance would get now: its ticks plus everything on its
    // point it queues behind (link-sharing results co-run instead)
    Rat potential_start(int i) const {
        int n = node_of(i);
        int p = g_.nodes[n].point;
        Rat ps = max_input_tick(i);
        if (p < 0) return ps;
        ps = std::max(ps, committed_timer_[p]);
        for (int m : g_.nodes_on_point[p]) {
            if (g_.nodes[m].kind == TaskKind::storage || shares_links(n, m)) continue;
            for (int k = 0; k < I_; ++k) {
                if (!instance_exists(m, k)) continue;
                for (const Frag& fr : inst_[iid(m, k)].frags) ps = std::max(ps, fr.end);
            }
        }
        return ps;
    }

    // --- triggers: late activations that must co-run with evaluated results ---

    bool apply_trigger_or_join() {
        if (drain_triggers()) return true;
        for (int p = 0; p < (int)g_.nodes_on_point.size(); ++p) {
            if (!g_.point_shared[p]) continue;
            std::vector<std::pair<Rat, int>> pending;
            for (int n : g_.nodes_on_point[p]) {
                for (int k = 0; k < I_; ++k) {
                    if (!instance_exists(n, k)) continue;
                    int i = iid(n, k);
                    const Inst& x = inst_[i];
                    if (!activated(i) || x.start || x.complete || x.processed) continue;
                    if (!g_.nodes[n].barrier.empty() || g_.nodes[n].kind == TaskKind::storage) continue;
                    pending.push_back({potential_start(i), i});
                }
            }
            std::sort(pending.begin(), pending.end(), [](const auto& a, const auto& b) {
                return a.first != b.first ? a.first < b.first : a.second < b.second;
            });
            for (auto& [ps, i] : pending) {
                int n = node_of(i);
                bool overlap = false;
                for (int m : g_.nodes_on_point[p]) {
                    if (!shares_links(n, m)) continue;
                    for (int k = 0; k < I_; ++k) {
                        if (!instance_exists(m, k)) continue;
                        for (const Frag& fr : inst_[iid(m, k)].frags)
                            if (!fr.committed && fr.end > ps) overlap = true;
                    }
                }
                int join_ep = -1;
                if (!overlap && open_episode_[p] >= 0) {
                    const Episode& ep = episodes_[open_episode_[p]];
                    for (int m : ep.members)
                        if (!inst_[m].complete && shares_links(n, node_of(m))) join_ep = open_episode_[p];
                }
                if (overlap) {
                    withdraw_point(p, ps);
                    drain_triggers();
                    if (open_episode_[p] >= 0) join(open_episode_[p], i, ps);
                    return true;
                }
                if (join_ep >= 0) {
                    join(join_ep, i, ps);
                    return true;
                }
            }
        }
        return false;
    }

    void join(int ep, int i, const Rat& ps) {
        Inst& x = inst_[i];
        x.start = ps;
        x.episode = ep;
        x.admit_seq = admit_counter_++;
        episodes_[ep].members.push_back(i);
        open_episode_[episodes_[ep].point] = ep;
    }

    // --- commits ---

    bool instance_fully_committed(int i) const {
        const Inst& x = inst_[i];
        if (!(x.complete || x.processed)) return false;
        for (const Frag& f : x.frags)
            if (!f.committed) return false;
        return true;
    }

    bool preds_committed(int i) const {
        int n = node_of(i), k = iter_of(i);
        for (int e : g_.in_edges[n]) {
            int src = g_.edges[e].first;
            if (!instance_fully_committed(iid(src, producer_iter(src, k)))) return false;
        }
        return true;
    }

    // conservative lower bound on the eventual start of an unevaluated
    // instance, built only from committed state
    Rat commit_bound(int i) const {
        int n = node_of(i), k = iter_of(i);
        Rat b = external_time(n);
        if (g_.nodes[n].point >= 0) b = std::max(b, committed_timer_[g_.nodes[n].point]);
        for (int e : g_.in_edges[n]) {
            int src = g_.edges[e].first;
            if (instance_fully_committed(iid(src, producer_iter(src, k)))) {
                auto ts = tick_at(e, k);
                if (ts) b = std::max(b, *ts);
            } else if (g_.nodes[src].point >= 0) {
                b = std::max(b, committed_timer_[g_.nodes[src].point]);
            }
        }
        return b;
    }

    bool apply_commits() {
        struct Entry {
            Rat end;
            int point, inst, frag;
        };
        std::vector<Entry> staged;
        for (int i = 0; i < (int)inst_.size(); ++i) {
            if (!instance_exists(node_of(i), iter_of(i))) continue;
            const Inst& x = inst_[i];
            for (int f = 0; f < (int)x.frags.size(); ++f)
                if (!x.frags[f].committed)
                    staged.push_back({x.frags[f].end, g_.nodes[node_of(i)].point, i, f});
        }
        std::sort(staged.begin(), staged.end(), [](const Entry& a, const Entry& b) {
            if (a.end != b.end) return a.end < b.end;
            if (a.point != b.point) return a.point < b.point;
            if (a.inst != b.inst) return a.inst < b.inst;
            return a.frag < b.frag;
        });
        bool any = false, progressed = true;
        while (progressed) {
            progressed = false;
            std::set<int> blocked_points;
            for (const Entry& en : staged) {
                Frag& fr = inst_[en.inst].frags[en.frag];
                if (fr.committed) continue;
                if (en.point >= 0 && blocked_points.count(en.point)) continue;
                bool ok;
                if (opt_.naive) {
                    ok = inst_[en.inst].complete || inst_[en.inst].processed;
                } else {
                    ok = true;
                    if (en.frag > 0 && !inst_[en.inst].frags[en.frag - 1].committed) ok = false;
                    if (ok && !preds_committed(en.inst)) ok = false;
                    if (ok && !g_.nodes[node_of(en.inst)].barrier.empty())
                        ok = barrier_committable(en.inst);
                    if (ok && en.point >= 0 && g_.point_shared[en.point])
                        ok = no_pending_contender_before(en.point, fr.end);
                }
                if (ok) {
                    fr.committed = true;
                    if (en.point >= 0)
                        committed_timer_[en.point] = std::max(committed_timer_[en.point], fr.end);
                    any = true;
                    progressed = true;
                } else if (en.point >= 0) {
                    blocked_points.insert(en.point);  // commit chronologically per point
                }
            }
        }
        return any;
    }

    bool barrier_committable(int i) const {
        const std::string& key = g_.nodes[node_of(i)].barrier;
        int k = iter_of(i);
        for (int n : g_.barriers.at(key)) {
            if (!instance_exists(n, k)) continue;
            if (!preds_committed(iid(n, k))) return false;
        }
        return true;
    }

    // nothing unevaluated on p can still start before `end`
    bool no_pending_contender_before(int p, const Rat& end) const {
        for (int m : g_.nodes_on_point[p]) {
            if (g_.nodes[m].kind == TaskKind::storage) continue;
            for (int k = 0; k < I_; ++k) {
                if (!instance_exists(m, k)) continue;
                int i = iid(m, k);
                const Inst& x = inst_[i];
                if (x.complete || x.processed) continue;
                if (x.episode >= 0 && x.start) continue;  // running episode member
                if (commit_bound(i) < end) return false;
            }
        }
        return true;
    }

    // --- admission and evaluation ---

    Rat member_acct(int i) const {
        const Inst& x = inst_[i];
        Rat a = x.start ? *x.start : Rat(0);
        for (const Frag& f : x.frags) a = std::max(a, f.end);
        return a;
    }

    bool advance_one() {
        struct Cand {
            Rat key;
            int point;
            int sort2;
            int episode;            // >= 0: advance episode
            std::vector<int> zone;  // else admit zone
        };
        std::optional<Cand> best;
        auto consider = [&](Cand c) {
            if (!best || c.key < best->key ||
                (c.key == best->key &&
                 (c.point < best->point || (c.point == best->point && c.sort2 < best->sort2))))
                best = std::move(c);
        };
        for (int p = 0; p < (int)open_episode_.size(); ++p) {
            int e = open_episode_[p];
            if (e < 0) continue;
            bool unfinished = false;
            Rat key;
            bool first = true;
            for (int m : episodes_[e].members) {
                if (inst_[m].complete) continue;
                unfinished = true;
                Rat a = member_acct(m);
                if (first || a < key) key = a;
                first = false;
            }
            if (!unfinished) {
                open_episode_[p] = -1;  // drained; slot frees
                continue;
            }
            consider({key, p, 0, e, {}});
        }
        for (int p = 0; p < (int)g_.nodes_on_point.size(); ++p) {
            if (open_episode_[p] >= 0) continue;
            std::vector<int> pend;
            for (int n : g_.nodes_on_point[p]) {
                if (g_.nodes[n].kind == TaskKind::storage || !g_.nodes[n].barrier.empty()) continue;
                for (int k = 0; k < I_; ++k) {
                    if (!instance_exists(n, k)) continue;
                    int i = iid(n, k);
                    const Inst& x = inst_[i];
                    if (!activated(i) || x.start || x.complete || x.processed) continue;
                    pend.push_back(i);
                }
            }
            if (pend.empty()) continue;
            std::vector<std::pair<Rat, int>> byps;
            for (int i : pend) byps.push_back({potential_start(i), i});
            std::sort(byps.begin(), byps.end(), [](const auto& a, const auto& b) {
                return a.first != b.first ? a.first < b.first : a.second < b.second;
            });
            int seed = byps.front().second;
            std::vector<int> zone{seed};
            bool grow = true;
            while (grow) {
                grow = false;
                for (int i : pend) {
                    if (std::find(zone.begin(), zone.end(), i) != zone.end()) continue;
                    for (int z : zone) {
                        if (shares_links(node_of(i), node_of(z))) {
                            zone.push_back(i);
                            grow = true;
                            break;
                        }
                    }
                }
            }
            std::sort(zone.begin(), zone.end());
            consider({byps.front().first, p, 1, -1, std::move(zone)});
        }
        if (!best) return false;
        if (best->episode < 0) {
            Episode ep;
            ep.point = best->point;
            Rat floor = point_floor(best->point);
            int eid = (int)episodes_.size();
            for (int i : best->zone) {
                Inst& x = inst_[i];
                x.start = std::max(max_input_tick(i), floor);
                x.admit_seq = admit_counter_++;
                x.episode = eid;
            }
            ep.members = best->zone;
            episodes_.push_back(std::move(ep));
            open_episode_[best->point] = eid;
            return true;
        }
        evaluate_episode_step(best->episode);
        return true;
    }

    // Fluid sweep to the next member completion.  Rates follow the equal-split
    // rule: a transfer's rate is the minimum over its links of link bandwidth
    // divided by the number of transfers active on that link.
    void evaluate_episode_step(int e) {
        Episode& ep = episodes_[e];
        struct MS {
            int i;
            Rat start, tstart, acct, rem;
            Rat done_in_step = 0;
        };
        std::vector<MS> ms;
        std::vector<int> act;
        for (int m : ep.members)
            if (!inst_[m].complete) act.push_back(m);
        std::sort(act.begin(), act.end());
        if (act.empty()) return;
        for (int m : act) {
            const SimNode& nd = g_.nodes[node_of(m)];
            MS s;
            s.i = m;
            s.start = *inst_[m].start;
            s.tstart = s.start + Rat(nd.latency);
            s.acct = member_acct(m);
            s.rem = nd.work - inst_[m].done;
            ms.push_back(s);
        }
        // presence of already-recorded transfer history on this episode's links
        struct BgIv {
            Rat a, b;
            const std::vector<int>* links;
        };
        std::vector<BgIv> bg;
        Rat t = ms.front().acct;
        for (const MS& s : ms) t = std::min(t, s.acct);
        for (int m : ep.members) {
            const SimNode& nd = g_.nodes[node_of(m)];
            if (nd.links.empty()) continue;
            Rat tstart = inst_[m].start ? *inst_[m].start + Rat(nd.latency) : Rat(0);
            for (const Frag& f : inst_[m].frags) {
                if (f.work <= 0 || f.end <= t) continue;
                bg.push_back({std::max(f.start, tstart), f.end, &nd.links});
            }
        }

        auto transferring = [&](const MS& s, const Rat& now) {
            return s.rem > 0 && now >= s.tstart && now >= s.acct;
        };
        auto rate_of = [&](const MS& s, const Rat& now) -> Rat {
            const SimNode& nd = g_.nodes[node_of(s.i)];
            if (nd.links.empty()) return nd.base_rate;
            Rat r;
            bool first = true;
            for (int l : nd.links) {
                int cnt = 0;
                for (const MS& o : ms) {
                    if (!transferring(o, now)) continue;
                    const SimNode& ond = g_.nodes[node_of(o.i)];
                    if (std::find(ond.links.begin(), ond.links.end(), l) != ond.links.end()) ++cnt;
                }
                for (const BgIv& b : bg)
                    if (b.a <= now && now < b.b &&
                        std::find(b.links->begin(), b.links->end(), l) != b.links->end())
                        ++cnt;
                if (cnt == 0) cnt = 1;
                Rat rl = nd.base_rate / cnt;
                if (first || rl < r) r = rl;
                first = false;
            }
            return r;
        };

        Rat completion_time;
        std::vector<int> finishers;
        while (true) {
            finishers.clear();
            for (const MS& s : ms)
                if (s.rem <= 0 && t >= s.tstart && t >= s.acct) finishers.push_back(s.i);
            if (!finishers.empty()) {
                completion_time = t;
                break;
            }
            std::optional<Rat> horizon;
            auto upd = [&](const Rat& v) {
                if (v > t && (!horizon || v < *horizon)) horizon = v;
            };
            for (const MS& s : ms) {
                upd(s.tstart);
                upd(s.acct);
            }
            for (const BgIv& b : bg) {
                upd(b.a);
                upd(b.b);
            }
            std::vector<std::pair<Rat, int>> rates;
            for (MS& s : ms) {
                if (!transferring(s, t)) continue;
                Rat r = rate_of(s, t);
                if (r <= 0)
                    throw SimError("zero aggregate rate for " + g_.nodes[node_of(s.i)].label);
                rates.push_back({r, (int)(&s - ms.data())});
                Rat fin = t + s.rem / r;
                if (!horizon || fin < *horizon) horizon = fin;
            }
            if (!horizon) throw SimError("episode stalled (internal error)");
            Rat next = *horizon;
            for (auto& [r, idx] : rates) {
                MS& s = ms[idx];
                Rat delta = r * (next - t);
                if (delta > s.rem) delta = s.rem;
                s.rem -= delta;
                s.done_in_step += delta;
            }
            t = next;
        }

        for (MS& s : ms) {
            Inst& x = inst_[s.i];
            bool fin = std::find(finishers.begin(), finishers.end(), s.i) != finishers.end();
            if (!fin && s.acct >= completion_time) continue;  // not yet present
            if (!fin && s.done_in_step == 0 && s.acct == completion_time) continue;
            x.frags.push_back({s.acct, completion_time, s.done_in_step, false});
            x.done += s.done_in_step;
            if (fin) {
                x.complete = true;
                fire_outputs(s.i, completion_time);
            }
        }
    }

    // --- finalize ---

    SimulationResult finalize() {
        SimulationResult r;
        for (int i = 0; i < (int)inst_.size(); ++i) {
            int n = node_of(i), k = iter_of(i);
            if (!instance_exists(n, k)) continue;
            const Inst& x = inst_[i];
            if ((x.complete || x.processed) && instance_fully_committed(i)) continue;
            std::ostringstream os;
            os << "deadlock: unresolved tasks remain:";
            int shown = 0;
            for (int j = 0; j < (int)inst_.size(); ++j) {
                int nj = node_of(j);
                if (!instance_exists(nj, iter_of(j))) continue;
                const Inst& y = inst_[j];
                if ((y.complete || y.processed) && instance_fully_committed(j)) continue;
                if (shown++ > 8) {
                    os << " ...";
                    break;
                }
                os << " " << g_.nodes[nj].label << "(iter " << iter_of(j) << ", " << y.missing
                   << " inputs missing)";
            }
            r.ok = false;
            r.error = os.str();
            return r;
        }

        auto coord_str = [&](int p) {
            return p < 0 ? std::string("-") : model_.point_table[p].coord.str();
        };

        for (int i = 0; i < (int)inst_.size(); ++i) {
            int n = node_of(i), k = iter_of(i);
            if (!instance_exists(n, k)) continue;
            const SimNode& nd = g_.nodes[n];
            const Inst& x = inst_[i];
            if (nd.kind == TaskKind::storage) continue;
            int nf = (int)x.frags.size();
            for (int f = 0; f < nf; ++f) {
                TraceRow row;
                row.label = nd.label;
                row.point = coord_str(nd.point);
                row.iteration = k;
                row.fragment = f + 1;
                row.fragments = nf;
                row.start = x.frags[f].start;
                row.end = x.frags[f].end;
                row.work = x.frags[f].work;
                r.trace.push_back(std::move(row));
            }
            Rat fin = x.frags.empty() ? Rat(0) : x.frags.back().end;
            if (!nd.origin.empty()) {
                auto it = r.completion.find(nd.origin);
                if (it == r.completion.end() || fin > it->second) r.completion[nd.origin] = fin;
            }
            r.makespan = std::max(r.makespan, fin);
        }
        std::sort(r.trace.begin(), r.trace.end(), [](const TraceRow& a, const TraceRow& b) {
            if (a.start != b.start) return a.start < b.start;
            if (a.point != b.point) return a.point < b.point;
            if (a.label != b.label) return a.label < b.label;
            if (a.iteration != b.iteration) return a.iteration < b.iteration;
            return a.fragment < b.fragment;
        });

        std::map<int, std::vector<std::pair<Rat, std::int64_t>>> events;
        for (int i = 0; i < (int)inst_.size(); ++i) {
            int n = node_of(i), k = iter_of(i);
            if (!instance_exists(n, k)) continue;
            const SimNode& nd = g_.nodes[n];
            if (nd.kind != TaskKind::storage) continue;
            const Inst& x = inst_[i];
            StorageLifetime lt;
            lt.label = nd.label;
            lt.point = coord_str(nd.point);
            lt.iteration = k;
            lt.bytes = nd.mem_bytes;
            lt.start = x.start ? *x.start : Rat(0);
            bool consumed = false;
            Rat end = lt.start;
            for (int e : g_.out_edges[n]) {
                int dst = g_.edges[e].second;
                for (int ck = 0; ck < I_; ++ck) {
                    if (!instance_exists(dst, ck) || producer_iter(n, ck) != k) continue;
                    const Inst& c = inst_[iid(dst, ck)];
                    if (!c.frags.empty()) {
                        consumed = true;
                        end = std::max(end, c.frags.back().end);
                    }
                }
            }
            if (!consumed) {
                lt.leaked = true;
                end = std::max(end, r.makespan);
            }
            lt.end = end;
            if (nd.point >= 0 && nd.mem_bytes > 0) {
                events[nd.point].push_back({lt.start, nd.mem_bytes});
                events[nd.point].push_back({lt.end, -nd.mem_bytes});
            }
            r.storage.push_back(std::move(lt));
        }
        std::sort(r.storage.begin(), r.storage.end(),
                  [](const StorageLifetime& a, const StorageLifetime& b) {
                      if (a.start != b.start) return a.start < b.start;
                      if (a.label != b.label) return a.label < b.label;
                      return a.iteration < b.iteration;
                  });
        bool overflow = false;
        std::string overflow_msg;
        for (auto& [p, evs] : events) {
            std::sort(evs.begin(), evs.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first < b.first;
                return a.second > b.second;  // allocate before free at equal times
            });
            std::int64_t cur = 0, peak = 0;
            for (auto& [tm, d] : evs) {
                cur += d;
                peak = std::max(peak, cur);
            }
            MemoryStat msr;
            msr.point = coord_str(p);
            msr.peak = peak;
            msr.capacity = model_.point_table[p].point.param_or("capacity", 0);
            if (msr.capacity > 0 && Rat(peak) > msr.capacity) {
                overflow = true;
                overflow_msg = "memory capacity exceeded on " + msr.point + ": peak " +
                               std::to_string(peak) + " bytes, capacity " + rat_str(msr.capacity);
            }
            r.memory.push_back(std::move(msr));
        }

        {
            std::map<int, std::vector<std::pair<Rat, Rat>>> busy;
            for (int i = 0; i < (int)inst_.size(); ++i) {
                int n = node_of(i);
                if (!instance_exists(n, iter_of(i))) continue;
                const SimNode& nd = g_.nodes[n];
                if (nd.point < 0 || nd.kind == TaskKind::storage) continue;
                for (const Frag& f : inst_[i].frags)
                    if (f.end > f.start) busy[nd.point].push_back({f.start, f.end});
            }
            for (auto& [p, ivs] : busy) {
                std::sort(ivs.begin(), ivs.end());
                Rat total = 0, s = 0, en = 0;
                bool open = false;
                for (auto& [a, b] : ivs) {
                    if (!open) {
                        s = a;
                        en = b;
                        open = true;
                    } else if (a <= en) {
                        en = std::max(en, b);
                    } else {
                        total += en - s;
                        s = a;
                        en = b;
                    }
                }
                if (open) total += en - s;
                r.utilization[coord_str(p)] = r.makespan > 0 ? total / r.makespan : Rat(0);
            }
        }

        {
            std::map<int, std::vector<std::pair<Rat, Rat>>> by_link;
            for (int i = 0; i < (int)inst_.size(); ++i) {
                int n = node_of(i);
                if (!instance_exists(n, iter_of(i))) continue;
                const SimNode& nd = g_.nodes[n];
                if (nd.links.empty()) continue;
                for (const Frag& f : inst_[i].frags)
                    if (f.work > 0)
                        for (int l : nd.links) by_link[l].push_back({f.start, f.end});
            }
            for (auto& [l, ivs] : by_link) {
                std::vector<std::pair<Rat, int>> edges2;
                for (auto& [a, b] : ivs) {
                    edges2.push_back({a, 1});
                    edges2.push_back({b, -1});
                }
                std::sort(edges2.begin(), edges2.end());
                int depth = 0;
                Rat contended = 0, last = 0;
                for (auto& [tm, d] : edges2) {
                    if (depth >= 2) contended += tm - last;
                    depth += d;
                    last = tm;
                }
                if (contended > 0) r.link_contention[g_.link_names[l]] = contended;
            }
        }

        if (opt_.check_invariants) check_invariants(r);
        if (overflow) {
            r.ok = false;
            r.error = overflow_msg;
        } else if (!r.violations.empty()) {
            r.ok = false;
            r.error = "consistency violations detected";
        } else {
            r.ok = true;
        }
        return r;
    }

    void check_invariants(SimulationResult& r) {
        for (int i = 0; i < (int)inst_.size(); ++i) {
            int n = node_of(i), k = iter_of(i);
            if (!instance_exists(n, k)) continue;
            const Inst& x = inst_[i];
            if (x.frags.empty()) continue;
            Rat start = x.frags.front().start;
            for (int e : g_.in_edges[n]) {
                int src = g_.edges[e].first;
                const Inst& px = inst_[iid(src, producer_iter(src, k))];
                if (px.frags.empty()) continue;
                Rat pend = px.frags.back().end;
                if (start < pend)
                    r.violations.push_back("dependency order: " + g_.nodes[n].label + " starts " +
                                           rat_str(start) + " before " + g_.nodes[src].label +
                                           " ends " + rat_str(pend));
                if (g_.nodes[n].kind != TaskKind::storage &&
                    g_.nodes[src].kind != TaskKind::storage && x.admit_seq >= 0 &&
                    px.admit_seq >= 0 && px.admit_seq > x.admit_seq)
                    r.violations.push_back("schedule order does not extend dependency order: " +
                                           g_.nodes[src].label + " -> " + g_.nodes[n].label);
            }
            if (x.complete && g_.nodes[n].point >= 0 && g_.nodes[n].kind != TaskKind::storage &&
                g_.nodes[n].barrier.empty()) {
                Rat total = 0;
                for (const Frag& f : x.frags) total += f.work;
                if (total != g_.nodes[n].work)
                    r.violations.push_back("work not conserved for " + g_.nodes[n].label + ": " +
                                           rat_str(total) + " != " + rat_str(g_.nodes[n].work));
            }
        }
        if (!opt_.naive) {
            struct Iv {
                Rat a, b;
                int ep, inst;
            };
            std::map<int, std::vector<Iv>> per_point;
            for (int i = 0; i < (int)inst_.size(); ++i) {
                int n = node_of(i);
                if (!instance_exists(n, iter_of(i))) continue;
                const SimNode& nd = g_.nodes[n];
                if (nd.point < 0 || nd.kind == TaskKind::storage) continue;
                const Inst& x = inst_[i];
                for (const Frag& f : x.frags) per_point[nd.point].push_back({f.start, f.end, x.episode, i});
            }
            for (auto& [p, ivs] : per_point) {
                for (std::size_t a = 0; a < ivs.size(); ++a) {
                    for (std::size_t b2 = a + 1; b2 < ivs.size(); ++b2) {
                        if (ivs[a].ep == ivs[b2].ep && ivs[a].ep >= 0) continue;
                        if (ivs[a].a < ivs[b2].b && ivs[b2].a < ivs[a].b)
                            r.violations.push_back(
                                "resource order: overlapping results on point " +
                                model_.point_table[p].coord.str() + " between " +
                                g_.nodes[node_of(ivs[a].inst)].label + " and " +
                                g_.nodes[node_of(ivs[b2].inst)].label);
                    }
                }
            }
        }
    }
};

// ---------------------------------------------------------------------------
// Entry point and report writers.

inline SimulationResult simulate(const HardwareModel& model, const TaskGraph& graph,
                                 const Mapping& mapping, const SimOptions& opt = {},
                                 const EvaluatorRegistry& registry = EvaluatorRegistry::builtin()) {
    auto gdiags = graph.validate_graph();
    if (!gdiags.empty()) {
        SimulationResult r;
        r.error = "invalid graph: " + gdiags.front().locus + ": " + gdiags.front().message;
        return r;
    }
    LoweredGraph lowered = lower(model, graph, mapping, registry);
    Engine engine(model, lowered, opt);
    return engine.run();
}

inline std::string trace_text(const SimulationResult& r) {
    std::ostringstream os;
    for (const TraceRow& row : r.trace) {
        os << row.label << "\t" << row.point << "\t" << row.iteration << "\t" << rat_str(row.start)
           << "\t" << rat_str(row.end) << "\t" << row.fragment << "/" << row.fragments << "\t"
           << row.status << "\n";
    }
    for (const StorageLifetime& lt : r.storage) {
        os << lt.label << "\t" << lt.point << "\t" << lt.iteration << "\t" << rat_str(lt.start)
           << "\t" << rat_str(lt.end) << "\t-\t" << (lt.leaked ? "leaked" : "stored") << "\n";
    }
    return os.str();
}

inline std::string summary_text(const SimulationResult& r) {
    std::ostringstream os;
    os << "status: " << (r.ok ? "ok" : ("error: " + r.error)) << "\n";
    os << "makespan: " << rat_str(r.makespan) << "\n";
    os << "completions:\n";
    for (const auto& [task, t] : r.completion) os << "  " << task << ": " << rat_str(t) << "\n";
    if (!r.utilization.empty()) {
        os << "utilization:\n";
        for (const auto& [p, u] : r.utilization) os << "  " << p << ": " << rat_decimal(u, 4) << "\n";
    }
    if (!r.memory.empty()) {
        os << "memory:\n";
        for (const MemoryStat& m : r.memory)
            os << "  " << m.point << ": peak " << m.peak << " bytes"
               << (m.capacity > 0 ? " / capacity " + rat_str(m.capacity) : "") << "\n";
    }
    if (!r.link_contention.empty()) {
        os << "link contention:\n";
        for (const auto& [l, t] : r.link_contention) os << "  " << l << ": " << rat_str(t) << "\n";
    }
    if (!r.storage.empty()) {
        os << "storage:\n";
        for (const auto& lt : r.storage)
            os << "  " << lt.label << " iter " << lt.iteration << ": [" << rat_str(lt.start) << ", "
               << rat_str(lt.end) << "] " << lt.bytes << " bytes" << (lt.leaked ? " (leaked)" : "")
               << "\n";
    }
    if (!r.violations.empty()) {
        os << "violations:\n";
        for (const auto& v : r.violations) os << "  " << v << "\n";
    }
    return os.str();
}

}  // namespace strata
