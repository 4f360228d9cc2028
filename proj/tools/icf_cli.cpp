// Command-line front end: fit scalar continued-fraction interpolants, fit
// integral-fraction kernel sets, verify the continual interpolation
// conditions, and check the constant-node reduction. Configs are single JSON
// documents; numeric output uses 17 significant digits throughout.
//
// Exit codes: 0 success, 1 verification failure, 2 config/parse error,
// 3 numerical breakdown.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "icf/icf.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw icf::ValidationError("cannot open config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw icf::ValidationError("invalid JSON in " + path + ": " +
                                   e.what());
    }
    if (!cfg.is_object())
        throw icf::ValidationError("config must be a JSON object");
    return cfg;
}

void check_mode(const json& cfg, const std::string& expected) {
    if (cfg.contains("mode") &&
        cfg.at("mode").get<std::string>() != expected)
        throw icf::ValidationError("config mode '" +
                                   cfg.at("mode").get<std::string>() +
                                   "' does not match subcommand '" + expected +
                                   "'");
}

int grid_cells(const json& cfg, int flag_value) {
    if (flag_value > 0) return flag_value;
    if (cfg.contains("n_cells")) return cfg.at("n_cells").get<int>();
    return 512;
}

double tolerance(const json& cfg, double flag_value) {
    if (flag_value >= 0.0) return flag_value;
    if (cfg.contains("tolerance")) return cfg.at("tolerance").get<double>();
    return 1e-6;
}

icf::NodeSystem system_from_config(const json& cfg, int cells) {
    if (!cfg.contains("f") || !cfg.contains("nodes"))
        throw icf::ValidationError("config needs 'f' and 'nodes'");
    std::vector<std::string> node_texts;
    for (const json& entry : cfg.at("nodes")) {
        if (entry.is_string())
            node_texts.push_back(entry.get<std::string>());
        else if (entry.is_number())
            node_texts.push_back(
                icf::expr::format_number(entry.get<double>()));
        else
            throw icf::ValidationError(
                "node entries must be expressions or numbers");
    }
    if (node_texts.size() < 2)
        throw icf::ValidationError(
            "at least two node functions are required (n >= 1)");
    return icf::make_node_system(cfg.at("f").get<std::string>(), node_texts,
                                 cells);
}

std::vector<double> parse_points(const std::string& list) {
    std::vector<double> points;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            points.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw icf::ValidationError("invalid evaluation point: '" + item +
                                       "'");
        }
    }
    if (points.empty())
        throw icf::ValidationError("--at needs at least one point");
    return points;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw icf::ValidationError("cannot open output file: " + path);
    out << content;
}

void print_warnings(const icf::KernelSet& ks) {
    for (const std::string& w : ks.warnings)
        std::cerr << "warning: " << w << "\n";
}

int run_fit_fn(const json& cfg, const std::string& out) {
    check_mode(cfg, "fit-fn");
    if (!cfg.contains("nodes"))
        throw icf::ValidationError("fit-fn config needs 'nodes'");
    const auto nodes = cfg.at("nodes").get<std::vector<double>>();
    std::vector<double> values;
    if (cfg.contains("values")) {
        values = cfg.at("values").get<std::vector<double>>();
    } else if (cfg.contains("f")) {
        const icf::expr::Ast f =
            icf::expr::parse(cfg.at("f").get<std::string>(), "s");
        values.reserve(nodes.size());
        for (double x : nodes) values.push_back(f.eval(x));
    } else {
        throw icf::ValidationError("fit-fn config needs 'values' or 'f'");
    }
    const icf::InterpCFraction model =
        icf::fit_interp_cfraction(nodes, values);
    const std::string doc = icf::cfraction_to_json(model).dump(2) + "\n";
    if (out.empty())
        std::cout << doc;
    else
        write_text_file(out, doc);
    return 0;
}

int run_eval_fn(const json& cfg, const std::string& at) {
    const icf::InterpCFraction model = icf::cfraction_from_json(cfg);
    std::cout << "x,value\n";
    for (double x : parse_points(at))
        std::cout << icf::expr::format_number(x) << ','
                  << icf::expr::format_number(icf::evaluate(model, x))
                  << '\n';
    return 0;
}

int run_fit_functional(const json& cfg, const std::string& out, int grid) {
    check_mode(cfg, "fit-functional");
    const icf::NodeSystem sys = system_from_config(cfg, grid_cells(cfg, grid));
    const icf::KernelSet ks = icf::compute_kernels(sys);
    print_warnings(ks);
    const std::string csv_path = out.empty() ? "kernels.csv" : out;
    {
        std::ostringstream csv;
        icf::write_kernel_csv(ks, csv);
        write_text_file(csv_path, csv.str());
    }
    const std::string sidecar_path =
        fs::path(csv_path).replace_extension(".json").string();
    write_text_file(sidecar_path,
                    icf::kernel_sidecar_json(ks).dump(2) + "\n");
    std::cout << "kernel table written to " << csv_path << " (sidecar "
              << sidecar_path << ")\n";
    return 0;
}

int run_verify(const json& cfg, const std::string& out, int grid,
               double tol_flag) {
    check_mode(cfg, "verify");
    const double tol = tolerance(cfg, tol_flag);
    const icf::NodeSystem sys = system_from_config(cfg, grid_cells(cfg, grid));
    const icf::KernelSet ks = icf::compute_kernels(sys);
    print_warnings(ks);
    const icf::InterpolationReport rep = icf::verify_interpolation(ks);
    if (!rep.breakdowns.empty()) {
        const auto [level, j] = rep.breakdowns.front();
        std::cerr << "breakdown while verifying level " << level << " at xi = "
                  << icf::expr::format_number(ks.kernels.front().z(j)) << " ("
                  << rep.breakdowns.size() << " cell(s) affected)\n";
        return 3;
    }
    if (!out.empty()) {
        std::ostringstream csv;
        icf::write_report_csv(ks, rep, csv);
        write_text_file(out, csv.str());
    }
    std::cout << "max residual = "
              << icf::expr::format_number(rep.max_residual) << " (tolerance "
              << icf::expr::format_number(tol) << ")\n";
    return rep.max_residual <= tol ? 0 : 1;
}

int run_reduce_check(const json& cfg, int grid, double tol_flag) {
    check_mode(cfg, "reduce-check");
    const double tol = tolerance(cfg, tol_flag);
    const icf::NodeSystem sys = system_from_config(cfg, grid_cells(cfg, grid));
    const icf::KernelSet ks = icf::compute_kernels(sys);
    print_warnings(ks);
    const icf::ReductionReport rep = icf::scalar_reduction_report(ks);
    std::cout << "a0: integral = " << icf::expr::format_number(ks.a0)
              << ", scalar = "
              << icf::expr::format_number(rep.scalar.coefficients[0])
              << ", |diff| = " << icf::expr::format_number(rep.a0_error)
              << '\n';
    for (std::size_t m = 0; m < rep.integrated_coefficients.size(); ++m)
        std::cout << "a" << (m + 1) << ": integral = "
                  << icf::expr::format_number(rep.integrated_coefficients[m])
                  << ", scalar = "
                  << icf::expr::format_number(rep.scalar.coefficients[m + 1])
                  << ", |diff| = "
                  << icf::expr::format_number(rep.coefficient_errors[m])
                  << '\n';
    std::cout << "max discrepancy = "
              << icf::expr::format_number(rep.max_error) << " (tolerance "
              << icf::expr::format_number(tol) << ")\n";
    return rep.max_error <= tol ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "interpolation by continued C-fractions and integral continued "
        "C-fractions"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string at_list;
    int grid = 0;
    double tol = -1.0;

    CLI::App* fit_fn =
        app.add_subcommand("fit-fn", "fit a scalar interpolant to node/value data");
    fit_fn->add_option("--config", config_path, "job config (JSON)")
        ->required();
    fit_fn->add_option("--out", out_path, "model output path");

    CLI::App* eval_fn =
        app.add_subcommand("eval-fn", "evaluate a fitted scalar model");
    eval_fn->add_option("--config", config_path, "model document (JSON)")
        ->required();
    eval_fn->add_option("--at", at_list, "comma-separated evaluation points")
        ->required();

    CLI::App* fit_functional = app.add_subcommand(
        "fit-functional", "compute the kernel set for a node system");
    fit_functional->add_option("--config", config_path, "job config (JSON)")
        ->required();
    fit_functional->add_option("--out", out_path, "kernel CSV output path");
    fit_functional->add_option("--grid", grid, "override grid cell count");

    CLI::App* verify = app.add_subcommand(
        "verify", "check the continual interpolation conditions");
    verify->add_option("--config", config_path, "job config (JSON)")
        ->required();
    verify->add_option("--out", out_path, "residual/kernel CSV output path");
    verify->add_option("--grid", grid, "override grid cell count");
    verify->add_option("--tol", tol, "residual tolerance");

    CLI::App* reduce_check = app.add_subcommand(
        "reduce-check", "compare integrated kernels to the scalar fit");
    reduce_check->add_option("--config", config_path, "job config (JSON)")
        ->required();
    reduce_check->add_option("--grid", grid, "override grid cell count");
    reduce_check->add_option("--tol", tol, "discrepancy tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (fit_fn->parsed()) return run_fit_fn(load_config(config_path), out_path);
        if (eval_fn->parsed()) return run_eval_fn(load_config(config_path), at_list);
        if (fit_functional->parsed())
            return run_fit_functional(load_config(config_path), out_path, grid);
        if (verify->parsed())
            return run_verify(load_config(config_path), out_path, grid, tol);
        if (reduce_check->parsed())
            return run_reduce_check(load_config(config_path), grid, tol);
    } catch (const icf::BreakdownError& e) {
        std::cerr << "breakdown: " << e.what() << "\n";
        return 3;
    } catch (const icf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
