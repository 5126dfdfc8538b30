#include "qclip/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qclip/json_io.hpp"
#include "qclip/svg_plot.hpp"

namespace qclip::cli {

namespace {

namespace fs = std::filesystem;
using json_io::json;

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

void write_text_file(const std::string& path, const std::string& content) {
    if (const fs::path parent = fs::path(path).parent_path(); !parent.empty()) {
        fs::create_directories(parent);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InvalidConfig("cannot write " + path);
    }
    out << content;
}

void write_metrics_csv(const std::string& path, const train::MetricsLog& log) {
    std::ostringstream os;
    log.write_csv(os);
    write_text_file(path, os.str());
}

void write_plot(const std::string& path, const train::MetricsLog& log, svg::PlotKind kind) {
    std::ostringstream os;
    svg::emit_plot(log, kind, os);
    write_text_file(path, os.str());
}

struct TrainFlags {
    std::string method = "naive";
    std::size_t epochs = 200;
    double lr = 0.05;
    std::size_t batch = 16;
    double lambda = 0.0;
    double eps = 0.1;
    std::size_t pgd_steps = 7;
    std::string norm = "l2";
    std::uint64_t seed = 0;

    void attach(CLI::App* cmd, bool with_method = true) {
        if (with_method) {
            cmd->add_option("--method", method, "training method: naive|pgd|lipreg")
                ->check(CLI::IsMember({"naive", "pgd", "lipreg"}));
        }
        cmd->add_option("--epochs", epochs, "training epochs");
        cmd->add_option("--lr", lr, "SGD learning rate");
        cmd->add_option("--batch", batch, "mini-batch size");
        cmd->add_option("--lambda", lambda, "Lipschitz regularization weight");
        cmd->add_option("--eps", eps, "PGD linf radius");
        cmd->add_option("--pgd-steps", pgd_steps, "PGD iterations");
        cmd->add_option("--norm", norm, "norm tag: l1|l2|linf")
            ->check(CLI::IsMember({"l1", "l2", "linf"}));
        cmd->add_option("--seed", seed, "random seed");
    }

    train::TrainConfig to_config() const {
        train::TrainConfig cfg;
        cfg.method = train::train_method_from_string(method);
        cfg.epochs = epochs;
        cfg.lr = lr;
        cfg.batch = batch;
        cfg.lambda = lambda;
        cfg.eps = eps;
        cfg.pgd_steps = pgd_steps;
        cfg.norm = classical::norm_from_string(norm);
        cfg.seed = seed;
        return cfg;
    }
};

json per_block_json(const hybrid::HybridBoundReport& report) {
    json blocks = json::array();
    for (const auto& e : report.per_block) {
        blocks.push_back({{"block", e.block_id},
                          {"constant", e.constant},
                          {"method", e.method},
                          {"in_norm", hybrid::norm_tag_string(e.in_norm)},
                          {"out_norm", hybrid::norm_tag_string(e.out_norm)}});
    }
    return blocks;
}

// ---- subcommand bodies ----

int cmd_qlip(const std::string& circuit_path, const std::string& method, std::size_t pairs,
             std::size_t iters, std::uint64_t seed, const std::string& out_path) {
    const auto c = json_io::circuit_from_json(json_io::load_json_file(circuit_path));
    const auto t0 = std::chrono::steady_clock::now();
    qlip::QuantumBoundReport report;
    if (method == "exact") {
        report = qlip::lipschitz_exact(c);
    } else if (method == "subgrad") {
        report = qlip::lipschitz_subgradient(c, iters, seed);
    } else {
        report = qlip::lipschitz_sampling(c, pairs, seed);
    }
    json j;
    j["k_star"] = report.k_star;
    j["method"] = qlip::method_string(report.method);
    j["runtime_ms"] = elapsed_ms(t0);
    if (report.sign_pattern.has_value()) {
        j["sign_pattern"] = *report.sign_pattern;
    }
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out_path.empty()) {
        write_text_file(out_path, text);
    }
    return 0;
}

int cmd_netlip(const std::string& model_path, const std::string& method, const std::string& norm,
               std::size_t samples, std::uint64_t seed, std::size_t budget,
               const std::string& out_path) {
    const auto net = json_io::densenet_from_json(json_io::load_json_file(model_path));
    const auto t0 = std::chrono::steady_clock::now();
    classical::ClassicalBoundReport report;
    if (method == "sdp") {
        report = classical::lip_sdp(net, budget);
    } else if (method == "product") {
        report = classical::lip_product(net, classical::norm_from_string(norm));
    } else {
        report = classical::lip_empirical(net, samples, seed, classical::norm_from_string(norm));
    }
    json j;
    j["bound"] = report.bound;
    j["norm"] = classical::norm_string(report.norm);
    j["method"] = classical::bound_method_string(report.method);
    j["runtime_ms"] = elapsed_ms(t0);
    if (report.method == classical::BoundMethod::sdp) {
        j["bisection_iterations"] = report.bisection_iterations;
        if (report.multipliers.has_value()) {
            j["multipliers"] = *report.multipliers;
        }
    }
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out_path.empty()) {
        write_text_file(out_path, text);
    }
    return 0;
}

int cmd_hyblip(const std::string& model_path, std::size_t samples, std::uint64_t seed,
               const std::string& norm, const std::string& out_path) {
    const auto model = json_io::hybrid_from_json(json_io::load_json_file(model_path));
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = hybrid::hybrid_lip_bound(model, classical::norm_from_string(norm));
    const double lower = hybrid::hybrid_lip_lower_norm(model, samples, seed,
                                                       classical::norm_from_string(norm));
    json j;
    j["total"] = report.total;
    j["lower_witness"] = lower;
    j["norm"] = norm;
    j["per_block"] = per_block_json(report);
    j["runtime_ms"] = elapsed_ms(t0);
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out_path.empty()) {
        write_text_file(out_path, text);
    }
    return 0;
}

int cmd_train(const std::string& model_path, const std::string& data_path,
              const TrainFlags& flags, const std::string& out_csv, const std::string& plot_path,
              const std::string& plot_kind) {
    auto model = json_io::hybrid_from_json(json_io::load_json_file(model_path));
    const auto data = train::Dataset::load_csv(data_path, flags.seed);
    const auto cfg = flags.to_config();
    const auto log = train::train(model, data, cfg);
    write_metrics_csv(out_csv, log);
    if (!plot_path.empty()) {
        write_plot(plot_path, log, svg::plot_kind_from_string(plot_kind));
    }
    json j;
    j["rows"] = log.rows.size();
    j["metrics_csv"] = out_csv;
    j["final_test_acc"] = log.rows.back().test_acc;
    j["final_lip_hybrid"] = log.rows.back().lip_hybrid;
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct ExperimentContext {
    json manifest;
    fs::path manifest_dir;
    std::string data_path;
    std::string out_dir;
    std::optional<std::size_t> epochs_override;
    std::optional<std::uint64_t> seed_override;

    hybrid::HybridModel fresh_model() const {
        const std::string rel = manifest.at("model").get<std::string>();
        const fs::path p = fs::path(rel).is_absolute() ? fs::path(rel) : manifest_dir / rel;
        return json_io::hybrid_from_json(json_io::load_json_file(p.string()));
    }

    std::size_t epochs(const json& section) const {
        return epochs_override.value_or(section.at("epochs").get<std::size_t>());
    }

    std::uint64_t seed(const json& section) const {
        return seed_override.value_or(section.at("seed").get<std::uint64_t>());
    }
};

train::Dataset uniform_labels(train::Dataset data, std::uint64_t seed) {
    for (auto& l : data.labels) {
        l = 0;
    }
    data.resplit(seed);
    return data;
}

int cmd_experiment(const std::string& id, const ExperimentContext& ctx) {
    const json& section = ctx.manifest.at(id);
    const std::uint64_t seed = ctx.seed(section);
    const std::size_t epochs = ctx.epochs(section);
    const auto base_data = train::Dataset::load_csv(ctx.data_path, seed);
    std::vector<std::string> written;

    auto save = [&](const std::string& name, const train::MetricsLog& log, svg::PlotKind kind) {
        const std::string csv_path = (fs::path(ctx.out_dir) / (name + ".csv")).string();
        const std::string svg_path = (fs::path(ctx.out_dir) / (name + ".svg")).string();
        write_metrics_csv(csv_path, log);
        write_plot(svg_path, log, kind);
        written.push_back(csv_path);
        written.push_back(svg_path);
    };

    if (id == "figure1") {
        for (const std::string variant : {"original", "uniform"}) {
            const train::Dataset data =
                variant == "original" ? base_data : uniform_labels(base_data, seed);
            train::MetricsLog combined;
            for (const auto& norm : section.at("norms")) {
                auto model = ctx.fresh_model();
                train::TrainConfig cfg;
                cfg.method = train::train_method_from_string(
                    section.at("method").get<std::string>());
                cfg.lambda = section.at("lambda").get<double>();
                cfg.norm = classical::norm_from_string(norm.get<std::string>());
                cfg.epochs = epochs;
                cfg.seed = seed;
                const auto log = train::train(model, data, cfg);
                combined.rows.insert(combined.rows.end(), log.rows.begin(), log.rows.end());
            }
            save("figure1_" + variant, combined, svg::PlotKind::lip_vs_epoch);
        }
    } else if (id == "figure2") {
        train::MetricsLog combined;
        for (const auto& lambda : section.at("lambdas")) {
            auto model = ctx.fresh_model();
            train::TrainConfig cfg;
            cfg.method = train::TrainMethod::lipreg;
            cfg.lambda = lambda.get<double>();
            cfg.norm = classical::norm_from_string(section.at("norm").get<std::string>());
            cfg.epochs = epochs;
            cfg.seed = seed;
            const auto log = train::train(model, base_data, cfg);
            combined.rows.insert(combined.rows.end(), log.rows.begin(), log.rows.end());
        }
        save("figure2", combined, svg::PlotKind::lambda_sweep);
    } else if (id == "figure3") {
        train::MetricsLog combined;
        for (const auto& method : section.at("methods")) {
            auto model = ctx.fresh_model();
            train::TrainConfig cfg;
            cfg.method = train::train_method_from_string(method.get<std::string>());
            cfg.norm = classical::norm_from_string(section.at("norm").get<std::string>());
            cfg.lambda = cfg.method == train::TrainMethod::lipreg
                             ? section.at("lambda").get<double>()
                             : 0.0;
            cfg.eps = section.at("eps").get<double>();
            cfg.pgd_steps = section.at("pgd_steps").get<std::size_t>();
            cfg.epochs = epochs;
            cfg.seed = seed;
            const auto log = train::train(model, base_data, cfg);
            combined.rows.insert(combined.rows.end(), log.rows.begin(), log.rows.end());
        }
        save("figure3", combined, svg::PlotKind::acc_lip_vs_epoch);
    } else {
        throw InvalidConfig("unknown experiment id: " + id);
    }

    json j;
    j["experiment"] = id;
    j["written"] = written;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_plot(const std::string& metrics_path, const std::string& kind,
             const std::string& out_path) {
    const auto log = json_io::metrics_from_csv(metrics_path);
    write_plot(out_path, log, svg::plot_kind_from_string(kind));
    json j;
    j["written"] = {out_path};
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int run_command(std::vector<std::string> args) {
    CLI::App app{"Certified Lipschitz bounds for classical, quantum-variational, and hybrid "
                 "classifiers", "qclip"};
    app.require_subcommand(1);

    // qlip
    std::string circuit_path;
    std::string qlip_method = "exact";
    std::size_t pairs = 10000;
    std::size_t iters = 500;
    std::uint64_t qlip_seed = 0;
    std::string qlip_out;
    auto* qlip_cmd = app.add_subcommand("qlip", "Lipschitz constant of a variational circuit");
    qlip_cmd->add_option("--circuit", circuit_path, "circuit JSON")->required();
    qlip_cmd->add_option("--method", qlip_method, "exact|subgrad|sample")
        ->check(CLI::IsMember({"exact", "subgrad", "sample"}));
    qlip_cmd->add_option("--pairs", pairs, "sampled state pairs (sample method)");
    qlip_cmd->add_option("--iters", iters, "ascent iterations (subgrad method)");
    qlip_cmd->add_option("--seed", qlip_seed, "random seed");
    qlip_cmd->add_option("--out", qlip_out, "also write the report JSON here");

    // netlip
    std::string net_path;
    std::string net_method = "sdp";
    std::string net_norm = "l2";
    std::size_t net_samples = 1000;
    std::uint64_t net_seed = 0;
    std::size_t net_budget = 200;
    std::string net_out;
    auto* netlip_cmd = app.add_subcommand("netlip", "Lipschitz bound of a dense network");
    netlip_cmd->add_option("--model", net_path, "network JSON")->required();
    netlip_cmd->add_option("--method", net_method, "sdp|product|empirical")
        ->check(CLI::IsMember({"sdp", "product", "empirical"}));
    netlip_cmd->add_option("--norm", net_norm, "l1|l2|linf")
        ->check(CLI::IsMember({"l1", "l2", "linf"}));
    netlip_cmd->add_option("--samples", net_samples, "pairs for the empirical method");
    netlip_cmd->add_option("--seed", net_seed, "random seed");
    netlip_cmd->add_option("--budget", net_budget, "multiplier-search evaluations");
    netlip_cmd->add_option("--out", net_out, "also write the report JSON here");

    // hyblip
    std::string hyb_path;
    std::size_t hyb_samples = 1000;
    std::uint64_t hyb_seed = 0;
    std::string hyb_norm = "l2";
    std::string hyb_out;
    auto* hyblip_cmd = app.add_subcommand("hyblip", "composed bound of a hybrid model");
    hyblip_cmd->add_option("--model", hyb_path, "hybrid model JSON")->required();
    hyblip_cmd->add_option("--samples", hyb_samples, "pairs for the lower witness");
    hyblip_cmd->add_option("--seed", hyb_seed, "random seed");
    hyblip_cmd->add_option("--norm", hyb_norm, "l1|l2|linf")
        ->check(CLI::IsMember({"l1", "l2", "linf"}));
    hyblip_cmd->add_option("--out", hyb_out, "also write the report JSON here");

    // train
    std::string train_model;
    std::string train_data = "data/iris.csv";
    std::string train_out = "metrics.csv";
    std::string train_plot;
    std::string train_plot_kind = "lip_vs_epoch";
    TrainFlags train_flags;
    auto* train_cmd = app.add_subcommand("train", "train a hybrid model and log metrics");
    train_cmd->add_option("--model", train_model, "hybrid model JSON")->required();
    train_cmd->add_option("--data", train_data, "dataset CSV");
    train_cmd->add_option("--out", train_out, "metrics CSV path");
    train_cmd->add_option("--plot", train_plot, "optional SVG path");
    train_cmd->add_option("--plot-kind", train_plot_kind,
                          "lip_vs_epoch|lambda_sweep|acc_lip_vs_epoch");
    train_flags.attach(train_cmd);

    // experiment
    std::string exp_id;
    std::string exp_out = "out";
    std::string exp_data = "data/iris.csv";
    std::string exp_manifest = "manifest/experiments.json";
    std::size_t exp_epochs = 0;
    std::uint64_t exp_seed = 0;
    bool exp_epochs_set = false;
    bool exp_seed_set = false;
    auto* exp_cmd = app.add_subcommand("experiment", "run a frozen experiment sweep");
    exp_cmd->add_option("id", exp_id, "figure1|figure2|figure3")
        ->required()
        ->check(CLI::IsMember({"figure1", "figure2", "figure3"}));
    exp_cmd->add_option("--out", exp_out, "output directory");
    exp_cmd->add_option("--data", exp_data, "dataset CSV");
    exp_cmd->add_option("--manifest", exp_manifest, "experiment manifest JSON");
    exp_cmd->add_option("--epochs", exp_epochs, "override the manifest epoch count")
        ->each([&](const std::string&) { exp_epochs_set = true; });
    exp_cmd->add_option("--seed", exp_seed, "override the manifest seed")
        ->each([&](const std::string&) { exp_seed_set = true; });

    // plot
    std::string plot_metrics;
    std::string plot_kind = "lip_vs_epoch";
    std::string plot_out = "plot.svg";
    auto* plot_cmd = app.add_subcommand("plot", "render a metrics CSV as SVG");
    plot_cmd->add_option("--metrics", plot_metrics, "metrics CSV")->required();
    plot_cmd->add_option("--kind", plot_kind, "lip_vs_epoch|lambda_sweep|acc_lip_vs_epoch");
    plot_cmd->add_option("--out", plot_out, "SVG path");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (qlip_cmd->parsed()) {
            return cmd_qlip(circuit_path, qlip_method, pairs, iters, qlip_seed, qlip_out);
        }
        if (netlip_cmd->parsed()) {
            return cmd_netlip(net_path, net_method, net_norm, net_samples, net_seed, net_budget,
                              net_out);
        }
        if (hyblip_cmd->parsed()) {
            return cmd_hyblip(hyb_path, hyb_samples, hyb_seed, hyb_norm, hyb_out);
        }
        if (train_cmd->parsed()) {
            return cmd_train(train_model, train_data, train_flags, train_out, train_plot,
                             train_plot_kind);
        }
        if (exp_cmd->parsed()) {
            ExperimentContext ctx;
            ctx.manifest = json_io::load_json_file(exp_manifest);
            ctx.manifest_dir = fs::path(exp_manifest).parent_path();
            ctx.data_path = exp_data;
            ctx.out_dir = exp_out;
            if (exp_epochs_set) {
                ctx.epochs_override = exp_epochs;
            }
            if (exp_seed_set) {
                ctx.seed_override = exp_seed;
            }
            return cmd_experiment(exp_id, ctx);
        }
        if (plot_cmd->parsed()) {
            return cmd_plot(plot_metrics, plot_kind, plot_out);
        }
    } catch (const NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace qclip::cli
