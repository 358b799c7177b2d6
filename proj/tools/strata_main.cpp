// strata command line: build and validate hardware models, construct mappings
// from primitive scripts, run simulations, and sweep hardware parameters.

#include "strata/strata.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string slurp(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error(file + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_or_print(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << text;
}

int cmd_build(const std::string& hw_file, bool dump_coords) {
    strata::HardwareModel model = strata::load_hardware(hw_file);
    auto diags = strata::validate(model);
    for (const auto& d : diags) std::cerr << hw_file << ": " << d.locus << ": " << d.message << "\n";
    auto counts = model.point_counts();
    std::cout << "depth=" << model.depth << "\n";
    for (const auto& [kind, n] : counts) std::cout << strata::to_string(kind) << "=" << n << "\n";
    std::cout << "virtual_groups=" << model.virtual_groups.size() << "\n";
    if (dump_coords) {
        for (const auto& [coord, pt] : model.enumerate_points())
            std::cout << coord.str() << "\t" << pt->id << "\t" << strata::to_string(pt->kind) << "\t"
                      << pt->evaluator << "\n";
    }
    return diags.empty() ? 0 : 1;
}

int cmd_map(const std::string& hw_file, const std::string& wl_file, const std::string& script_file,
            const std::string& out_file) {
    strata::HardwareModel model = strata::load_hardware(hw_file);
    strata::TaskGraph graph = strata::load_workload(wl_file);
    strata::SearchState st{graph, strata::Mapping{}, {}, 0};
    if (!script_file.empty()) st = strata::apply_script(st, model, slurp(script_file));
    auto diags = strata::validate_mapping(st.mapping, st.graph, model);
    for (const auto& d : diags) std::cerr << d.locus << ": " << d.message << "\n";
    write_or_print(out_file, st.mapping.to_json().dump(2) + "\n");
    return diags.empty() ? 0 : 1;
}

int cmd_simulate(const std::string& hw_file, const std::string& wl_file, const std::string& map_file,
                 int iterations, bool naive, const std::string& trace_out,
                 const std::string& report_out) {
    strata::HardwareModel model = strata::load_hardware(hw_file);
    strata::TaskGraph graph = strata::load_workload(wl_file);
    strata::Mapping mapping;
    if (!map_file.empty()) mapping = strata::load_mapping(map_file);
    strata::SimOptions opt;
    opt.iterations = iterations;
    opt.naive = naive;
    strata::SimulationResult res = strata::simulate(model, graph, mapping, opt);
    if (!trace_out.empty()) write_or_print(trace_out, strata::trace_text(res));
    write_or_print(report_out, strata::summary_text(res));
    return res.ok ? 0 : 1;
}

int cmd_sweep(const std::string& sweep_file, const std::string& out_file) {
    strata::SweepSpec spec = strata::load_sweep_spec(sweep_file);
    auto rows = strata::run_sweep(spec);
    write_or_print(out_file, strata::sweep_csv(spec, rows));
    for (const auto& r : rows)
        if (!r.ok) return 1;
    return 0;
}

int cmd_evaluators_list() {
    for (const auto& [name, ev] : strata::EvaluatorRegistry::builtin().all()) {
        std::cout << name << "\t";
        bool first = true;
        for (auto k : ev->applicable()) {
            std::cout << (first ? "" : ",") << strata::to_string(k);
            first = false;
        }
        if (ev->applicable().empty()) std::cout << "-";
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"strata: multi-level hardware modeling, mapping, and simulation"};
    app.require_subcommand(1);

    std::string hw_file, wl_file, map_file, script_file, out_file, trace_out, report_out, sweep_file;
    bool dump_coords = false, naive = false;
    int iterations = 1;
    std::uint64_t seed = 0;

    auto* build = app.add_subcommand("build", "build and validate a hardware description");
    build->add_option("hardware", hw_file, "hardware description file")->required();
    build->add_flag("--dump-coords", dump_coords, "list every point coordinate");

    auto* map = app.add_subcommand("map", "construct a mapping from a primitive script");
    map->add_option("hardware", hw_file)->required();
    map->add_option("workload", wl_file)->required();
    map->add_option("--script", script_file, "primitive script (one invocation per line)");
    map->add_option("-o,--out", out_file, "mapping output file (default stdout)");

    auto* sim = app.add_subcommand("simulate", "simulate a mapped workload");
    sim->add_option("hardware", hw_file)->required();
    sim->add_option("workload", wl_file)->required();
    sim->add_option("mapping", map_file, "mapping file (omit to auto-route a fully placed workload)");
    sim->add_option("--iterations", iterations, "streamed batch count")->default_val(1);
    sim->add_flag("--naive-traversal", naive,
                  "disable the consistency machinery (contention-blind schedule)");
    sim->add_option("--trace-out", trace_out, "write the committed trace here");
    sim->add_option("--report-out", report_out, "write the summary here (default stdout)");

    auto* sweep = app.add_subcommand("sweep", "run a hardware parameter sweep");
    sweep->add_option("spec", sweep_file, "sweep specification file")->required();
    sweep->add_option("-o,--out", out_file, "CSV output file (default stdout)");

    auto* evals = app.add_subcommand("evaluators", "evaluation model registry");
    auto* evlist = evals->add_subcommand("list", "list registered evaluators");

    app.add_option("--seed", seed, "seed for randomized example drivers");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return cmd_build(hw_file, dump_coords);
        if (map->parsed()) return cmd_map(hw_file, wl_file, script_file, out_file);
        if (sim->parsed())
            return cmd_simulate(hw_file, wl_file, map_file, iterations, naive, trace_out, report_out);
        if (sweep->parsed()) return cmd_sweep(sweep_file, out_file);
        if (evals->parsed() && evlist->parsed()) return cmd_evaluators_list();
        std::cerr << app.help();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
