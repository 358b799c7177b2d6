// Parameter sweeps: a base hardware description, a list of (parameter path,
// values) axes, a workload, and an optional mapping script.  Every point in
// the cross product builds, maps, simulates, and lands as one CSV row; a
// failing point reports as a failed row without stopping the sweep.

#pragma once

#include "strata/hardware_loader.hpp"
#include "strata/primitives.hpp"
#include "strata/simulator.hpp"
#include "strata/task_graph.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace strata {

struct SweepAxis {
    std::string path;  // dotted path into the hardware JSON (array indices numeric)
    std::vector<nlohmann::json> values;
};

struct SweepSpec {
    nlohmann::json base_hardware;
    std::vector<SweepAxis> axes;
    TaskGraph workload;
    std::string script;  // primitive script text, may be empty
    int iterations = 1;
};

namespace detail {

inline nlohmann::json* resolve_path(nlohmann::json& doc, const std::string& path) {
    nlohmann::json* cur = &doc;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (cur->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(part);
            } catch (...) {
                return nullptr;
            }
            if (idx >= cur->size()) return nullptr;
            cur = &(*cur)[idx];
        } else if (cur->is_object()) {
            if (!cur->contains(part)) return nullptr;
            cur = &cur->at(part);
        } else {
            return nullptr;
        }
    }
    return cur;
}

}  // namespace detail

inline SweepSpec load_sweep_spec(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ParseError(file + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    nlohmann::json j = detail::parse_json_text(ss.str(), file);
    SweepSpec spec;

    auto dir_of = [&](const std::string& f) {
        auto slash = f.find_last_of('/');
        return slash == std::string::npos ? std::string() : f.substr(0, slash + 1);
    };
    auto resolve_file = [&](std::string p) {
        if (!p.empty() && p.front() != '/') p = dir_of(file) + p;
        return p;
    };

    if (!j.contains("hardware")) throw ParseError(file + ": missing 'hardware'");
    {
        std::string hw = resolve_file(j.at("hardware").get<std::string>());
        std::ifstream hin(hw);
        if (!hin) throw ParseError(hw + ": cannot open");
        std::stringstream hss;
        hss << hin.rdbuf();
        spec.base_hardware = detail::parse_json_text(hss.str(), hw);
    }
    if (!j.contains("workload")) throw ParseError(file + ": missing 'workload'");
    spec.workload = load_workload(resolve_file(j.at("workload").get<std::string>()));
    if (j.contains("script")) {
        std::string sf = resolve_file(j.at("script").get<std::string>());
        std::ifstream sin(sf);
        if (!sin) throw ParseError(sf + ": cannot open");
        std::stringstream sss;
        sss << sin.rdbuf();
        spec.script = sss.str();
    }
    if (j.contains("iterations")) spec.iterations = j.at("iterations").get<int>();
    if (!j.contains("axes")) throw ParseError(file + ": missing 'axes'");
    for (const auto& aj : j.at("axes")) {
        SweepAxis ax;
        ax.path = aj.at("path").get<std::string>();
        for (const auto& v : aj.at("values")) ax.values.push_back(v);
        if (ax.values.empty()) throw ParseError(file + ": axis '" + ax.path + "' has no values");
        spec.axes.push_back(std::move(ax));
    }
    // every axis path must resolve in the base description
    nlohmann::json probe = spec.base_hardware;
    for (const auto& ax : spec.axes)
        if (!detail::resolve_path(probe, ax.path))
            throw ParseError("axis path '" + ax.path + "' does not resolve in the base hardware");
    return spec;
}

struct SweepRow {
    std::vector<std::string> values;  // one per axis
    bool ok = false;
    std::string error;
    Rat makespan = 0;
    Rat mean_compute_util = 0;
    Rat mean_comm_util = 0;
};

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    std::vector<std::size_t> counter(spec.axes.size(), 0);
    std::vector<SweepRow> rows;
    bool done = spec.axes.empty();
    std::size_t total = 1;
    for (const auto& ax : spec.axes) total *= ax.values.size();
    for (std::size_t pt = 0; pt < total; ++pt) {
        nlohmann::json hw = spec.base_hardware;
        SweepRow row;
        for (std::size_t a = 0; a < spec.axes.size(); ++a) {
            nlohmann::json* slot = detail::resolve_path(hw, spec.axes[a].path);
            *slot = spec.axes[a].values[counter[a]];
            row.values.push_back(spec.axes[a].values[counter[a]].dump());
        }
        try {
            HardwareDescription desc = parse_hardware_description(hw.dump(), "sweep-point");
            HardwareModel model = build(desc);
            SearchState st{spec.workload, Mapping{}, {}, 0};
            if (!spec.script.empty()) st = apply_script(st, model, spec.script);
            SimOptions opt;
            opt.iterations = spec.iterations;
            SimulationResult res = simulate(model, st.graph, st.mapping, opt);
            row.ok = res.ok;
            row.error = res.error;
            row.makespan = res.makespan;
            Rat csum = 0, ksum = 0;
            int cn = 0, kn = 0;
            for (const auto& [coord, util] : res.utilization) {
                const SpacePoint& p = model.point_at(MultiLevelCoord::parse(coord));
                if (p.kind == PointKind::compute) {
                    csum += util;
                    cn++;
                } else if (p.kind == PointKind::communication) {
                    ksum += util;
                    kn++;
                }
            }
            if (cn) row.mean_compute_util = csum / cn;
            if (kn) row.mean_comm_util = ksum / kn;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            if (++counter[a] < spec.axes[a].values.size()) break;
            counter[a] = 0;
        }
        (void)done;
    }
    return rows;
}

inline std::string sweep_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    for (std::size_t a = 0; a < spec.axes.size(); ++a) os << spec.axes[a].path << ",";
    os << "status,makespan_cycles,mean_compute_util,mean_comm_util,error\n";
    for (const SweepRow& r : rows) {
        for (const auto& v : r.values) os << v << ",";
        os << (r.ok ? "ok" : "failed") << "," << rat_decimal(r.makespan, 3) << ","
           << rat_decimal(r.mean_compute_util, 4) << "," << rat_decimal(r.mean_comm_util, 4) << ",";
        std::string err = r.error;
        for (char& c : err)
            if (c == ',' || c == '\n') c = ';';
        os << err << "\n";
    }
    return os.str();
}

}  // namespace strata
