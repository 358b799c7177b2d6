// Per-point analytical evaluation models.  Each model maps (point params,
// task work) to a duration in cycles; durations are ceiled to whole cycles at
// this boundary, while the scheduler's contention math stays rational.

#pragma once

#include "strata/hardware.hpp"
#include "strata/task_graph.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>

namespace strata {

struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

// Roofline: duration = max(op_count / throughput, bytes_moved / local bandwidth).
inline std::int64_t roofline_compute(const Rat& throughput, const Rat& mem_bandwidth,
                                     std::int64_t ops, std::int64_t bytes_moved) {
    if (ops == 0 && bytes_moved == 0) return 0;
    if (throughput <= 0) throw EvalError("roofline: throughput must be > 0");
    Rat compute_bound = Rat(ops) / throughput;
    Rat memory_bound = 0;
    if (bytes_moved > 0) {
        if (mem_bandwidth <= 0) throw EvalError("roofline: local memory bandwidth must be > 0");
        memory_bound = Rat(bytes_moved) / mem_bandwidth;
    }
    return ceil_to_i64(std::max(compute_bound, memory_bound));
}

// Closed-form link transfer at a scheduler-supplied effective bandwidth.
inline std::int64_t link_transfer(const TopologySpec& spec, std::int64_t hops,
                                  std::int64_t volume, const Rat& effective_bw) {
    if (hops < 0) throw EvalError("link_transfer: negative hop count");
    if (volume == 0) return hops * spec.hop_latency;
    if (effective_bw <= 0) throw EvalError("link_transfer: effective bandwidth must be > 0");
    return hops * spec.hop_latency + ceil_to_i64(Rat(volume) / effective_bw);
}

// Ring reduce + fully-connected all-gather collective:
//   T = (n-1)L + (n-1)S/(nB) + L + 2S/B
// Units: L in cycles, S in bytes, B in bytes/cycle.  Exact rational result.
inline Rat all_reduce_latency(std::int64_t n, const Rat& link_latency, const Rat& bytes,
                              const Rat& bandwidth) {
    if (n < 1) throw EvalError("all_reduce_latency: device count must be >= 1");
    if (bandwidth <= 0) throw EvalError("all_reduce_latency: bandwidth must be > 0");
    if (link_latency < 0 || bytes < 0) throw EvalError("all_reduce_latency: negative input");
    Rat ring = Rat(n - 1) * link_latency + Rat(n - 1) * bytes / (Rat(n) * bandwidth);
    Rat gather = link_latency + Rat(2) * bytes / bandwidth;
    return ring + gather;
}

// Storage occupancy record over simulator-provided lifetimes.
struct StorageFootprint {
    std::int64_t bytes = 0;
    Rat start;
    Rat end;
    Rat duration() const { return end - start; }
};

inline StorageFootprint storage_footprint(std::int64_t size, const Rat& start, const Rat& end) {
    if (end < start)
        throw EvalError("storage_footprint: negative survival duration (scheduler bug)");
    return StorageFootprint{size, start, end};
}

// ---------------------------------------------------------------------------
// Registry.  Points bind to a model by name at build time; the simulator asks
// the bound model for non-communication task durations.  Communication points
// bound to "link" use the scheduler's fluid contention path instead; "allreduce"
// points evaluate tasks with the collective closed form and serialize.

class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual std::string name() const = 0;
    virtual std::set<TaskKind> applicable() const = 0;
    virtual Rat duration(const SpacePoint& point, const Task& task) const = 0;
};

class RooflineEvaluator final : public Evaluator {
public:
    std::string name() const override { return "roofline"; }
    std::set<TaskKind> applicable() const override { return {TaskKind::compute}; }
    Rat duration(const SpacePoint& point, const Task& task) const override {
        return Rat(roofline_compute(point.param_or("throughput", 0),
                                    point.param_or("mem_bandwidth", 0), task.ops,
                                    task.bytes_in + task.bytes_out));
    }
};

class LinkEvaluator final : public Evaluator {
public:
    std::string name() const override { return "link"; }
    std::set<TaskKind> applicable() const override { return {TaskKind::communication}; }
    // Un-contended closed form; the scheduler overrides this with the fluid
    // model whenever contention groups form.
    Rat duration(const SpacePoint& point, const Task& task) const override {
        if (!point.topology) throw EvalError(point.id + ": link evaluator needs a topology");
        return Rat(link_transfer(*point.topology, 0, task.volume, point.topology->link_bandwidth));
    }
};

class AllReduceEvaluator final : public Evaluator {
public:
    std::string name() const override { return "allreduce"; }
    std::set<TaskKind> applicable() const override { return {TaskKind::communication}; }
    Rat duration(const SpacePoint& point, const Task& task) const override {
        if (!point.topology) throw EvalError(point.id + ": allreduce evaluator needs a topology");
        std::int64_t n = 1;
        if (point.has_param("group_size")) {
            n = ceil_to_i64(point.param_or("group_size", 1));
        }
        return all_reduce_latency(n, Rat(point.topology->hop_latency), Rat(task.volume),
                                  point.topology->link_bandwidth);
    }
};

class StorageEvaluator final : public Evaluator {
public:
    std::string name() const override { return "storage"; }
    std::set<TaskKind> applicable() const override { return {TaskKind::storage}; }
    Rat duration(const SpacePoint&, const Task&) const override { return 0; }
};

class NullEvaluator final : public Evaluator {
public:
    std::string name() const override { return "none"; }
    std::set<TaskKind> applicable() const override { return {}; }
    Rat duration(const SpacePoint& point, const Task&) const override {
        throw EvalError(point.id + ": point has no evaluation model");
    }
};

class EvaluatorRegistry {
public:
    void add(std::shared_ptr<Evaluator> e) { byname_[e->name()] = std::move(e); }

    const Evaluator& get(const std::string& name) const {
        auto it = byname_.find(name);
        if (it == byname_.end()) throw EvalError("unknown evaluator '" + name + "'");
        return *it->second;
    }
    bool has(const std::string& name) const { return byname_.count(name) > 0; }

    std::set<std::string> names() const {
        std::set<std::string> out;
        for (const auto& [n, e] : byname_) out.insert(n);
        return out;
    }
    const std::map<std::string, std::shared_ptr<Evaluator>>& all() const { return byname_; }

    static const EvaluatorRegistry& builtin() {
        static EvaluatorRegistry reg = [] {
            EvaluatorRegistry r;
            r.add(std::make_shared<RooflineEvaluator>());
            r.add(std::make_shared<LinkEvaluator>());
            r.add(std::make_shared<AllReduceEvaluator>());
            r.add(std::make_shared<StorageEvaluator>());
            r.add(std::make_shared<NullEvaluator>());
            return r;
        }();
        return reg;
    }

private:
    std::map<std::string, std::shared_ptr<Evaluator>> byname_;
};

}  // namespace strata
