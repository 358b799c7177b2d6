// Tensor-granularity task graph: computation/storage/communication/sync tasks
// with data dependencies.  Graphs are plain values; validation and layering
// are free functions over them.

#pragma once

#include "strata/rational.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace strata {

enum class TaskKind { compute, storage, communication, sync };

inline const char* to_string(TaskKind k) {
    switch (k) {
        case TaskKind::compute: return "compute";
        case TaskKind::storage: return "storage";
        case TaskKind::communication: return "communication";
        case TaskKind::sync: return "sync";
    }
    return "?";
}

inline std::optional<TaskKind> task_kind_from(const std::string& s) {
    if (s == "compute") return TaskKind::compute;
    if (s == "storage") return TaskKind::storage;
    if (s == "communication") return TaskKind::communication;
    if (s == "sync") return TaskKind::sync;
    return std::nullopt;
}

struct Task {
    std::string id;
    TaskKind kind = TaskKind::compute;
    std::int64_t ops = 0;        // compute: MAC-ops
    std::int64_t bytes_in = 0;   // compute: bytes read
    std::int64_t bytes_out = 0;  // compute: bytes written
    std::int64_t size = 0;       // storage: bytes occupied
    std::int64_t volume = 0;     // communication: bytes moved
    std::string sync_id;         // sync tasks only
    bool iterable = true;        // participates in streamed batches
};

struct Dependency {
    std::string src;
    std::string dst;
    std::int64_t bytes = 0;  // 0 allowed: pure ordering
};

struct GraphError : std::runtime_error {
    explicit GraphError(const std::string& what) : std::runtime_error(what) {}
};

struct Diag {
    std::string locus;
    std::string message;
};

class TaskGraph {
public:
    void add_task(Task t) {
        if (index_.count(t.id)) throw GraphError("duplicate task id '" + t.id + "'");
        switch (t.kind) {
            case TaskKind::compute:
                if (t.ops < 0 || t.bytes_in < 0 || t.bytes_out < 0)
                    throw GraphError(t.id + ": negative work");
                break;
            case TaskKind::storage:
                if (t.size < 0) throw GraphError(t.id + ": negative size");
                break;
            case TaskKind::communication:
                if (t.volume <= 0) throw GraphError(t.id + ": communication volume must be > 0");
                break;
            case TaskKind::sync:
                if (t.ops || t.bytes_in || t.bytes_out || t.size || t.volume)
                    throw GraphError(t.id + ": sync tasks carry no work");
                if (t.sync_id.empty()) throw GraphError(t.id + ": sync task needs a sync_id");
                break;
        }
        index_[t.id] = tasks_.size();
        tasks_.push_back(std::move(t));
    }

    void add_dependency(Dependency d) {
        if (!index_.count(d.src)) throw GraphError("dependency source '" + d.src + "' unknown");
        if (!index_.count(d.dst)) throw GraphError("dependency target '" + d.dst + "' unknown");
        deps_.push_back(std::move(d));
    }

    void remove_task(const std::string& id) {
        auto it = index_.find(id);
        if (it == index_.end()) throw GraphError("unknown task '" + id + "'");
        tasks_.erase(tasks_.begin() + it->second);
        deps_.erase(std::remove_if(deps_.begin(), deps_.end(),
                                   [&](const Dependency& d) { return d.src == id || d.dst == id; }),
                    deps_.end());
        reindex();
    }

    bool has_task(const std::string& id) const { return index_.count(id) > 0; }
    const Task& task(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw GraphError("unknown task '" + id + "'");
        return tasks_[it->second];
    }
    Task& task_mut(const std::string& id) {
        auto it = index_.find(id);
        if (it == index_.end()) throw GraphError("unknown task '" + id + "'");
        return tasks_[it->second];
    }

    const std::vector<Task>& tasks() const { return tasks_; }
    const std::vector<Dependency>& deps() const { return deps_; }

    std::vector<std::string> inputs() const {
        std::set<std::string> has_pred;
        for (const auto& d : deps_) has_pred.insert(d.dst);
        std::vector<std::string> out;
        for (const auto& t : tasks_)
            if (!has_pred.count(t.id)) out.push_back(t.id);
        return out;
    }

    std::vector<std::string> preds_of(const std::string& id) const {
        std::vector<std::string> out;
        for (const auto& d : deps_)
            if (d.dst == id) out.push_back(d.src);
        return out;
    }
    std::vector<std::string> succs_of(const std::string& id) const {
        std::vector<std::string> out;
        for (const auto& d : deps_)
            if (d.src == id) out.push_back(d.dst);
        return out;
    }

    std::vector<Diag> validate_graph() const {
        std::vector<Diag> out;
        std::set<std::string> ids;
        for (const auto& t : tasks_) {
            if (!ids.insert(t.id).second) out.push_back({t.id, "duplicate task id"});
            if (t.kind == TaskKind::communication && t.volume <= 0)
                out.push_back({t.id, "communication volume must be > 0"});
        }
        for (const auto& d : deps_) {
            if (!ids.count(d.src)) out.push_back({d.src + "->" + d.dst, "dangling source"});
            if (!ids.count(d.dst)) out.push_back({d.src + "->" + d.dst, "dangling target"});
        }
        auto cycle = find_cycle();
        if (!cycle.empty()) {
            std::string path;
            for (const auto& n : cycle) {
                if (!path.empty()) path += " -> ";
                path += n;
            }
            out.push_back({cycle.front(), "cycle: " + path});
        }
        return out;
    }

    // Kahn layering; within a layer tasks sort by id.
    std::vector<std::vector<std::string>> topological_layers() const {
        std::map<std::string, int> indeg;
        std::map<std::string, std::vector<std::string>> succ;
        for (const auto& t : tasks_) indeg[t.id] = 0;
        for (const auto& d : deps_) {
            indeg[d.dst]++;
            succ[d.src].push_back(d.dst);
        }
        std::vector<std::string> layer;
        for (const auto& [id, n] : indeg)
            if (n == 0) layer.push_back(id);
        std::vector<std::vector<std::string>> out;
        std::size_t done = 0;
        while (!layer.empty()) {
            std::sort(layer.begin(), layer.end());
            done += layer.size();
            std::vector<std::string> next;
            for (const auto& id : layer) {
                for (const auto& s : succ[id])
                    if (--indeg[s] == 0) next.push_back(s);
            }
            out.push_back(std::move(layer));
            layer = std::move(next);
        }
        if (done != tasks_.size()) throw GraphError("graph has a cycle; cannot layer");
        return out;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["tasks"] = nlohmann::ordered_json::array();
        for (const auto& t : tasks_) {
            nlohmann::ordered_json tj;
            tj["id"] = t.id;
            tj["kind"] = to_string(t.kind);
            switch (t.kind) {
                case TaskKind::compute:
                    tj["ops"] = t.ops;
                    tj["bytes_in"] = t.bytes_in;
                    tj["bytes_out"] = t.bytes_out;
                    break;
                case TaskKind::storage: tj["size"] = t.size; break;
                case TaskKind::communication: tj["volume"] = t.volume; break;
                case TaskKind::sync: tj["sync_id"] = t.sync_id; break;
            }
            if (!t.iterable) tj["iterable"] = false;
            j["tasks"].push_back(std::move(tj));
        }
        j["deps"] = nlohmann::ordered_json::array();
        for (const auto& d : deps_) {
            nlohmann::ordered_json dj;
            dj["src"] = d.src;
            dj["dst"] = d.dst;
            if (d.bytes) dj["bytes"] = d.bytes;
            j["deps"].push_back(std::move(dj));
        }
        return j;
    }

    static TaskGraph from_json(const nlohmann::json& j) {
        TaskGraph g;
        if (!j.contains("tasks")) throw GraphError("workload: missing 'tasks'");
        for (const auto& tj : j.at("tasks")) {
            Task t;
            t.id = tj.at("id").get<std::string>();
            auto k = task_kind_from(tj.at("kind").get<std::string>());
            if (!k) throw GraphError(t.id + ": unknown kind '" + tj.at("kind").get<std::string>() + "'");
            t.kind = *k;
            if (tj.contains("ops")) t.ops = tj.at("ops").get<std::int64_t>();
            if (tj.contains("bytes_in")) t.bytes_in = tj.at("bytes_in").get<std::int64_t>();
            if (tj.contains("bytes_out")) t.bytes_out = tj.at("bytes_out").get<std::int64_t>();
            if (tj.contains("size")) t.size = tj.at("size").get<std::int64_t>();
            if (tj.contains("volume")) t.volume = tj.at("volume").get<std::int64_t>();
            if (tj.contains("sync_id")) t.sync_id = tj.at("sync_id").get<std::string>();
            if (tj.contains("iterable")) t.iterable = tj.at("iterable").get<bool>();
            g.add_task(std::move(t));
        }
        if (j.contains("deps")) {
            for (const auto& dj : j.at("deps")) {
                Dependency d;
                d.src = dj.at("src").get<std::string>();
                d.dst = dj.at("dst").get<std::string>();
                if (dj.contains("bytes")) d.bytes = dj.at("bytes").get<std::int64_t>();
                g.add_dependency(std::move(d));
            }
        }
        return g;
    }

private:
    std::vector<Task> tasks_;
    std::vector<Dependency> deps_;
    std::map<std::string, std::size_t> index_;

    void reindex() {
        index_.clear();
        for (std::size_t i = 0; i < tasks_.size(); ++i) index_[tasks_[i].id] = i;
    }

    std::vector<std::string> find_cycle() const {
        std::map<std::string, std::vector<std::string>> succ;
        for (const auto& d : deps_) succ[d.src].push_back(d.dst);
        std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
        std::vector<std::string> stack, cycle;
        std::function<bool(const std::string&)> dfs = [&](const std::string& u) -> bool {
            state[u] = 1;
            stack.push_back(u);
            for (const auto& v : succ[u]) {
                if (state[v] == 1) {
                    auto it = std::find(stack.begin(), stack.end(), v);
                    cycle.assign(it, stack.end());
                    cycle.push_back(v);
                    return true;
                }
                if (state[v] == 0 && dfs(v)) return true;
            }
            stack.pop_back();
            state[u] = 2;
            return false;
        };
        for (const auto& t : tasks_)
            if (state[t.id] == 0 && dfs(t.id)) return cycle;
        return {};
    }
};

inline TaskGraph load_workload(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw GraphError(file + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw GraphError(file + ": " + e.what());
    }
    return TaskGraph::from_json(j);
}

inline void save_workload(const TaskGraph& g, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw GraphError(file + ": cannot open for writing");
    out << g.to_json().dump(2) << "\n";
}

}  // namespace strata
