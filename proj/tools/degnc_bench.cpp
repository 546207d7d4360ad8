// Experiment runner: loads or generates a pose graph, injects loop-closure
// outliers at the requested rates, runs the robust pipeline, and writes
// per-cell metrics to results.csv plus per-rate means to summary.json.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "degnc/g2o_io.hpp"
#include "degnc/metrics.hpp"
#include "degnc/pipeline.hpp"
#include "degnc/synthetic.hpp"

namespace {

struct CellRow {
    double rate;
    std::uint64_t seed;
    std::optional<double> ate_pos, ate_rot_deg, are_deg;
    double precision, recall;
    degnc::StageTimings timings;
    bool converged;
};

degnc::SyntheticSpec parse_layout_spec(const std::string& text) {
    // "grid:RxC[:step]" or "walk:N[:step]"
    degnc::SyntheticSpec spec;
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.empty()) throw CLI::ValidationError("--synthetic", "empty layout spec");

    if (parts[0] == "grid") {
        if (parts.size() < 2) throw CLI::ValidationError("--synthetic", "grid needs RxC");
        degnc::GridLayout g;
        if (std::sscanf(parts[1].c_str(), "%dx%d", &g.rows, &g.cols) != 2) {
            throw CLI::ValidationError("--synthetic", "bad grid size '" + parts[1] + "'");
        }
        if (parts.size() > 2) g.step = std::stod(parts[2]);
        spec.layout = g;
    } else if (parts[0] == "walk") {
        if (parts.size() < 2) throw CLI::ValidationError("--synthetic", "walk needs N");
        degnc::RandomWalkLayout w;
        w.n = std::stoi(parts[1]);
        if (parts.size() > 2) w.step = std::stod(parts[2]);
        spec.layout = w;
    } else {
        throw CLI::ValidationError("--synthetic", "unknown layout '" + parts[0] + "'");
    }
    return spec;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt(*v) : std::string("nan");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust planar pose-graph optimization benchmark runner"};

    std::string input_path, gt_path, synthetic_spec_text, out_dir = ".";
    std::string rates_text = "0.1";
    int runs = 1;
    std::uint64_t seed = 0;
    double c1sq = degnc::kChi2Inv99Dof1;
    double c2sq = degnc::kChi2Inv99Dof2;
    double gnc_factor = 1.4;
    double sigma_theta = 0.01, sigma_t = 0.05, lc_prob = 0.2;
    bool emit_trajectories = false;

    auto* input_opt = app.add_option("--input", input_path, "Input pose graph (.g2o)");
    auto* synth_opt = app.add_option("--synthetic", synthetic_spec_text,
                                     "Synthetic layout: grid:RxC[:step] or walk:N[:step]");
    input_opt->excludes(synth_opt);
    app.add_option("--gt", gt_path, "Ground-truth trajectory (.g2o VERTEX_SE2 records)");
    app.add_option("--rates", rates_text, "Comma-separated outlier rates");
    app.add_option("--runs", runs, "Monte Carlo runs per rate")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Base RNG seed");
    app.add_option("--c1sq", c1sq, "Squared rotation-stage truncation threshold");
    app.add_option("--c2sq", c2sq, "Squared translation-stage truncation threshold");
    app.add_option("--gnc-factor", gnc_factor, "GNC continuation factor");
    app.add_option("--sigma-theta", sigma_theta, "Synthetic rotation noise std (rad)");
    app.add_option("--sigma-t", sigma_t, "Synthetic translation noise std");
    app.add_option("--lc-prob", lc_prob, "Synthetic loop-closure probability");
    app.add_option("--out", out_dir, "Output directory");
    app.add_flag("--emit-trajectories", emit_trajectories,
                 "Write est_<rate>_<seed>.g2o per cell");

    CLI11_PARSE(app, argc, argv);

    if (input_path.empty() && synthetic_spec_text.empty()) {
        std::cerr << "error: need --input or --synthetic\n";
        return 1;
    }

    try {
        std::vector<double> rates;
        std::stringstream ss(rates_text);
        for (std::string p; std::getline(ss, p, ',');) rates.push_back(std::stod(p));

        std::filesystem::create_directories(out_dir);

        std::optional<degnc::G2oParseResult> file_input;
        std::optional<degnc::TrajectoryEstimate> file_gt;
        if (!input_path.empty()) {
            file_input = degnc::parse_g2o_file(input_path);
        }
        if (!gt_path.empty()) {
            auto gt_parsed = degnc::parse_g2o_file(gt_path);
            if (!gt_parsed.initial) {
                std::cerr << "error: ground-truth file has no VERTEX_SE2 records\n";
                return 1;
            }
            file_gt = gt_parsed.initial;
        }

        degnc::PipelineConfig config;
        config.c1_squared = c1sq;
        config.c2_squared = c2sq;
        config.gnc_factor = gnc_factor;

        std::vector<CellRow> rows;
        for (std::size_t ri = 0; ri < rates.size(); ++ri) {
            for (int run = 0; run < runs; ++run) {
                const std::uint64_t cell_seed =
                    seed * 1000003ull + ri * 101ull + static_cast<std::uint64_t>(run);

                degnc::PoseGraph base_graph;
                std::optional<degnc::TrajectoryEstimate> gt;
                std::vector<double> gt_are_reference;
                if (file_input) {
                    base_graph = file_input->graph;
                    gt = file_gt;
                } else {
                    degnc::SyntheticSpec spec = parse_layout_spec(synthetic_spec_text);
                    spec.sigma_theta = sigma_theta;
                    spec.sigma_t = sigma_t;
                    spec.loop_closure_probability = lc_prob;
                    spec.rng_seed = cell_seed;
                    auto synth = degnc::generate_synthetic(spec);
                    base_graph = std::move(synth.graph);
                    gt = std::move(synth.ground_truth);
                }

                degnc::InjectionSpec inj;
                inj.outlier_rate = rates[ri];
                inj.rng_seed = cell_seed + 0x9e3779b97f4a7c15ull;
                auto injected = degnc::inject_outliers(base_graph, inj);

                auto report = degnc::degnc_laf(injected.graph, config);

                CellRow row;
                row.rate = rates[ri];
                row.seed = cell_seed;
                row.timings = report.timings;
                row.converged = report.converged() && !report.refinement_stalled;

                auto cls = degnc::classify_outliers(
                    injected.injected_edges, injected.graph.loop_closure_indices(),
                    report.inlier_loop_closures);
                row.precision = cls.precision;
                row.recall = cls.recall;

                if (gt) {
                    auto ate = degnc::compute_ate(report.estimate, *gt);
                    row.ate_pos = ate.ate_pos;
                    row.ate_rot_deg = ate.ate_rot_deg;
                }
                row.are_deg =
                    degnc::compute_are_deg(report.ara_rotations, report.estimate.theta);
                rows.push_back(row);

                if (emit_trajectories) {
                    char name[128];
                    std::snprintf(name, sizeof(name), "est_%g_%llu.g2o", rates[ri],
                                  static_cast<unsigned long long>(cell_seed));
                    degnc::write_g2o_file(
                        (std::filesystem::path(out_dir) / name).string(), injected.graph,
                        &report.estimate);
                }
            }
        }

        std::sort(rows.begin(), rows.end(), [](const CellRow& a, const CellRow& b) {
            return std::tie(a.rate, a.seed) < std::tie(b.rate, b.seed);
        });

        std::ofstream csv(std::filesystem::path(out_dir) / "results.csv");
        csv << "rate,seed,ate_pos,ate_rot_deg,are_deg,precision,recall,"
               "t_reg_s,t_ara_s,t_ta_s,t_refine_s,converged\n";
        for (const auto& r : rows) {
            csv << fmt(r.rate) << ',' << r.seed << ',' << fmt_opt(r.ate_pos) << ','
                << fmt_opt(r.ate_rot_deg) << ',' << fmt_opt(r.are_deg) << ','
                << fmt(r.precision) << ',' << fmt(r.recall) << ','
                << fmt(r.timings.regularization_s) << ',' << fmt(r.timings.ara_s) << ','
                << fmt(r.timings.ta_s) << ',' << fmt(r.timings.refine_s) << ','
                << (r.converged ? 1 : 0) << '\n';
        }

        nlohmann::json summary;
        for (double rate : rates) {
            int count = 0, converged = 0;
            double ate_pos = 0, ate_rot = 0, are = 0, prec = 0, rec = 0;
            bool have_ate = false;
            for (const auto& r : rows) {
                if (r.rate != rate) continue;
                ++count;
                converged += r.converged ? 1 : 0;
                prec += r.precision;
                rec += r.recall;
                if (r.are_deg) are += *r.are_deg;
                if (r.ate_pos) {
                    have_ate = true;
                    ate_pos += *r.ate_pos;
                    ate_rot += *r.ate_rot_deg;
                }
            }
            nlohmann::json entry;
            entry["rate"] = rate;
            entry["runs"] = count;
            entry["converged"] = converged;
            entry["mean_precision"] = prec / count;
            entry["mean_recall"] = rec / count;
            entry["mean_are_deg"] = are / count;
            if (have_ate) {
                entry["mean_ate_pos"] = ate_pos / count;
                entry["mean_ate_rot_deg"] = ate_rot / count;
            }
            summary.push_back(entry);
        }
        std::ofstream js(std::filesystem::path(out_dir) / "summary.json");
        js << summary.dump(2) << '\n';
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
