// Hardware description files: one JSON document per model.  Parse errors cite
// line/column, semantic errors cite the field path.

#pragma once

#include "strata/hardware.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace strata {

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string byte_to_line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline nlohmann::json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(what + ": " + byte_to_line_col(text, e.byte) + ": " + e.what());
    }
}

inline Rat rat_field(const nlohmann::json& j, const std::string& path) {
    if (j.is_number_integer()) return Rat(j.get<std::int64_t>());
    if (j.is_number_unsigned()) return Rat((std::int64_t)j.get<std::uint64_t>());
    if (j.is_string()) {
        try {
            return parse_rat(j.get<std::string>());
        } catch (const std::exception&) {
            throw ParseError(path + ": not a rational value");
        }
    }
    if (j.is_number_float()) {
        // accept small decimal literals exactly
        double v = j.get<double>();
        std::int64_t scaled = (std::int64_t)(v * 1000000.0 + (v < 0 ? -0.5 : 0.5));
        return Rat(scaled, 1000000);
    }
    throw ParseError(path + ": expected a number or rational string");
}

inline TopologySpec parse_topology(const nlohmann::json& j, const std::string& path) {
    TopologySpec spec;
    if (!j.is_object()) throw ParseError(path + ": expected an object");
    if (!j.contains("pattern")) throw ParseError(path + ".pattern: missing");
    auto pat = topology_pattern_from(j.at("pattern").get<std::string>());
    if (!pat) throw ParseError(path + ".pattern: unknown pattern '" +
                               j.at("pattern").get<std::string>() + "'");
    spec.pattern = *pat;
    if (j.contains("link_bandwidth")) spec.link_bandwidth = rat_field(j.at("link_bandwidth"), path + ".link_bandwidth");
    if (j.contains("hop_latency")) spec.hop_latency = j.at("hop_latency").get<std::int64_t>();
    if (j.contains("routing")) {
        std::string r = j.at("routing").get<std::string>();
        if (r == "dimension-order") {
            spec.routing = RoutingPolicy::dimension_order;
        } else if (r == "shortest-path") {
            spec.routing = RoutingPolicy::shortest_path;
        } else {
            throw ParseError(path + ".routing: unknown policy '" + r + "'");
        }
    }
    return spec;
}

inline ElementDesc parse_element(const nlohmann::json& j, const std::string& path);

inline CommDesc parse_comm(const nlohmann::json& j, const std::string& path) {
    CommDesc cd;
    cd.spec = parse_topology(j, path);
    if (j.contains("name")) cd.name = j.at("name").get<std::string>();
    if (j.contains("evaluator")) cd.evaluator = j.at("evaluator").get<std::string>();
    return cd;
}

inline MatrixDesc parse_matrix(const nlohmann::json& j, const std::string& path) {
    MatrixDesc m;
    if (j.contains("name")) m.name = j.at("name").get<std::string>();
    if (!j.contains("dims")) throw ParseError(path + ".dims: missing");
    for (const auto& d : j.at("dims")) m.dims.push_back(d.get<std::int64_t>());
    if (j.contains("comm")) {
        const auto& c = j.at("comm");
        if (c.is_array()) {
            for (std::size_t i = 0; i < c.size(); ++i)
                m.comm.push_back(parse_comm(c[i], path + ".comm[" + std::to_string(i) + "]"));
        } else {
            m.comm.push_back(parse_comm(c, path + ".comm"));
        }
    }
    if (!j.contains("elements")) throw ParseError(path + ".elements: missing");
    std::size_t n = 0;
    for (const auto& e : j.at("elements")) {
        std::string epath = path + ".elements[" + std::to_string(n) + "]";
        if (e.is_object() && e.contains("repeat")) {
            std::int64_t k = e.at("repeat").get<std::int64_t>();
            if (k <= 0) throw ParseError(epath + ".repeat: must be positive");
            if (!e.contains("element")) throw ParseError(epath + ".element: missing");
            ElementDesc proto = parse_element(e.at("element"), epath + ".element");
            for (std::int64_t i = 0; i < k; ++i) {
                ElementDesc copy = proto;
                // repeated anonymous elements pick up their slot index as name
                m.elements.push_back(copy);
            }
        } else {
            m.elements.push_back(parse_element(e, epath));
        }
        ++n;
    }
    return m;
}

inline ElementDesc parse_element(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError(path + ": expected an object");
    if (j.contains("dims")) return ElementDesc::of(parse_matrix(j, path));
    PointDesc p;
    if (j.contains("name")) p.name = j.at("name").get<std::string>();
    if (!j.contains("kind")) throw ParseError(path + ".kind: missing (leaf point needs a kind)");
    auto k = point_kind_from(j.at("kind").get<std::string>());
    if (!k) throw ParseError(path + ".kind: unknown kind '" + j.at("kind").get<std::string>() + "'");
    p.kind = *k;
    if (j.contains("evaluator")) p.evaluator = j.at("evaluator").get<std::string>();
    if (j.contains("params")) {
        for (const auto& [key, val] : j.at("params").items())
            p.params[key] = rat_field(val, path + ".params." + key);
    }
    return ElementDesc::of(std::move(p));
}

}  // namespace detail

inline HardwareDescription parse_hardware_description(const std::string& text,
                                                      const std::string& what = "hardware") {
    nlohmann::json j = detail::parse_json_text(text, what);
    HardwareDescription desc;
    desc.root = detail::parse_element(j, what);
    if (j.contains("virtual_groups")) {
        std::size_t n = 0;
        for (const auto& g : j.at("virtual_groups")) {
            std::string gpath = what + ".virtual_groups[" + std::to_string(n++) + "]";
            GroupDesc gd;
            if (!g.contains("name")) throw ParseError(gpath + ".name: missing");
            gd.name = g.at("name").get<std::string>();
            if (g.contains("time_level")) gd.time_level = g.at("time_level").get<int>();
            if (!g.contains("members")) throw ParseError(gpath + ".members: missing");
            for (const auto& m : g.at("members")) gd.members.push_back(m.get<std::string>());
            desc.virtual_groups.push_back(std::move(gd));
        }
    }
    return desc;
}

inline HardwareDescription load_hardware_description(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ParseError(file + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_hardware_description(ss.str(), file);
}

inline HardwareModel load_hardware(const std::string& file,
                                   const std::set<std::string>& evaluators = default_evaluator_names()) {
    return build(load_hardware_description(file), evaluators);
}

}  // namespace strata
