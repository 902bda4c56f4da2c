// gmem: store binary patterns one neuron apiece, recall them from full or
// partial probes, and reproduce the recall experiments as CSV reports.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gmem/gmem.hpp"

namespace {

struct Dims {
    int width = 0;
    int height = 0;
};

Dims parse_size(const std::string& text) {
    Dims d;
    const auto x = text.find('x');
    if (x == std::string::npos) {
        d.width = d.height = std::stoi(text);
    } else {
        d.width = std::stoi(text.substr(0, x));
        d.height = std::stoi(text.substr(x + 1));
    }
    if (d.width < 1 || d.height < 1)
        throw CLI::ValidationError("--size", "dimensions must be positive");
    return d;
}

std::pair<double, double> parse_density(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        const double d = std::stod(text);
        return {d, d};
    }
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
}

std::vector<double> parse_fractions(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        out.push_back(std::stod(item));
    return out;
}

gmem::NormMode parse_norm(const std::string& text) {
    if (text == "presented")
        return gmem::NormMode::ByPresented;
    if (text == "r")
        return gmem::NormMode::ByR;
    throw CLI::ValidationError("--norm", "expected 'presented' or 'r'");
}

gmem::WeightDType parse_dtype(const std::string& text) {
    if (text == "f64")
        return gmem::WeightDType::F64;
    if (text == "f32")
        return gmem::WeightDType::F32;
    if (text == "f16")
        return gmem::WeightDType::F16;
    throw CLI::ValidationError("--dtype", "expected f64, f32 or f16");
}

gmem::Corner parse_corner(const std::string& text) {
    if (text == "tl") return gmem::Corner::TopLeft;
    if (text == "tr") return gmem::Corner::TopRight;
    if (text == "bl") return gmem::Corner::BottomLeft;
    if (text == "br") return gmem::Corner::BottomRight;
    throw CLI::ValidationError("--corner", "expected tl, tr, bl or br");
}

std::string timestamp() {
    const std::time_t now =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y%m%d-%H%M%S");
    return out.str();
}

std::string report_path(const std::string& flag_value, const char* experiment) {
    if (!flag_value.empty())
        return flag_value;
    return std::string(experiment) + "_" + timestamp() + ".csv";
}

gmem::MemoryNet load_net(const std::string& path, std::optional<double> tau_override) {
    gmem::MemoryNet net = gmem::load_weights(gmem::read_file(path));
    if (!tau_override)
        return net;
    gmem::HyperParams params = net.params();
    params.tau = *tau_override;
    return gmem::MemoryNet::from_weights(net.width(), net.height(), params,
                                         net.pattern_weights(), net.recall_weights());
}

void write_report(const gmem::ExperimentReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    gmem::write_csv(report, out);
    if (!out)
        throw std::runtime_error("write failed for " + path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-neuron-per-pattern associative memory"};
    app.require_subcommand(1);
    std::cout << std::fixed << std::setprecision(6);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic corpus directory");
    int gen_count = 0;
    std::string gen_size = "116";
    std::string gen_density = "0.475:0.507";
    bool gen_overlay = false;
    bool gen_plain = false;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen->add_option("--count", gen_count, "number of patterns")->required();
    gen->add_option("--size", gen_size, "pattern size, W or WxH (default 116)");
    gen->add_option("--density", gen_density, "density or lo:hi range (default 0.475:0.507)");
    gen->add_flag("--overlay", gen_overlay, "stamp shared finder-style corner blocks");
    gen->add_flag("--plain", gen_plain, "write plain (P1) instead of binary (P4) PBM");
    gen->add_option("--seed", gen_seed, "corpus seed (default 0)");
    gen->add_option("-o,--out", gen_out, "output directory")->required();

    // train
    auto* train = app.add_subcommand("train", "store a corpus into a weight file");
    std::string train_corpus, train_out;
    std::string train_dtype = "f64";
    gmem::HyperParams train_params;
    train->add_option("--corpus", train_corpus, "corpus directory (index.txt + PBM)")->required();
    train->add_option("-o,--out", train_out, "weight file to write")->required();
    train->add_option("--dtype", train_dtype, "weight element type: f64, f32, f16");
    train->add_option("--eps-w", train_params.eps_w, "pattern-weight learning rate");
    train->add_option("--eps-v", train_params.eps_v, "recall-weight learning rate");
    train->add_option("--theta", train_params.theta, "teacher signal");
    train->add_option("--tau", train_params.tau, "acceptance threshold");

    // recall
    auto* recall = app.add_subcommand("recall", "recall one probe pattern");
    std::string recall_weights, recall_probe, recall_norm = "presented", recall_emit;
    double recall_keep = 1.0;
    std::optional<double> recall_tau;
    recall->add_option("--weights", recall_weights, "weight file")->required();
    recall->add_option("--probe", recall_probe, "probe PBM file")->required();
    recall->add_option("--keep", recall_keep, "present only the bottom-right keep-fraction");
    recall->add_option("--norm", recall_norm, "score normalization: presented or r");
    recall->add_option("--tau", recall_tau, "override the acceptance threshold");
    recall->add_option("--emit", recall_emit, "write the reconstructed winner as PBM");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "full recall over a whole corpus");
    std::string eval_weights, eval_corpus, eval_norm = "presented", eval_out;
    std::optional<double> eval_tau;
    evaluate->add_option("--weights", eval_weights, "weight file")->required();
    evaluate->add_option("--corpus", eval_corpus, "corpus directory")->required();
    evaluate->add_option("--norm", eval_norm, "score normalization: presented or r");
    evaluate->add_option("--tau", eval_tau, "override the acceptance threshold");
    evaluate->add_option("-o,--out", eval_out, "report CSV (default full_recall_<timestamp>.csv)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "occlusion sweep over keep-fractions");
    std::string sweep_weights, sweep_corpus, sweep_norm = "presented", sweep_out;
    std::string sweep_fractions = "1.0,0.5,0.25,0.207,0.15,0.1,0.05";
    std::string sweep_corner = "br";
    std::optional<double> sweep_tau;
    sweep->add_option("--weights", sweep_weights, "weight file")->required();
    sweep->add_option("--corpus", sweep_corpus, "corpus directory")->required();
    sweep->add_option("--fractions", sweep_fractions, "comma-separated keep-fractions");
    sweep->add_option("--corner", sweep_corner, "kept corner: tl, tr, bl, br");
    sweep->add_option("--norm", sweep_norm, "score normalization: presented or r");
    sweep->add_option("--tau", sweep_tau, "override the acceptance threshold");
    sweep->add_option("-o,--out", sweep_out, "report CSV (default occlusion_sweep_<timestamp>.csv)");

    // probe
    auto* probe = app.add_subcommand("probe", "present a pattern that was never stored");
    std::string probe_weights, probe_corpus, probe_unknown, probe_norm = "presented", probe_out;
    std::optional<double> probe_tau;
    probe->add_option("--weights", probe_weights, "weight file")->required();
    probe->add_option("--corpus", probe_corpus, "corpus directory")->required();
    probe->add_option("--unknown", probe_unknown, "probe PBM file")->required();
    probe->add_option("--norm", probe_norm, "score normalization: presented or r");
    probe->add_option("--tau", probe_tau, "override the acceptance threshold");
    probe->add_option("-o,--out", probe_out, "report CSV (default unknown_probe_<timestamp>.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*gen) {
            gmem::CorpusSpec spec;
            spec.count = gen_count;
            const Dims dims = parse_size(gen_size);
            spec.width = dims.width;
            spec.height = dims.height;
            std::tie(spec.density_lo, spec.density_hi) = parse_density(gen_density);
            spec.structural_overlay = gen_overlay;
            spec.seed = gen_seed;
            const gmem::PatternSet set = gmem::generate_corpus(spec);
            gmem::save_pattern_dir(set, gen_out, !gen_plain);
            std::cout << "wrote " << set.size() << " patterns (" << spec.width << "x"
                      << spec.height << ") to " << gen_out << "\n";
        } else if (*train) {
            const gmem::PatternSet set = gmem::load_pattern_dir(train_corpus);
            gmem::MemoryNet net(set.patterns.front().width, set.patterns.front().height,
                                train_params);
            net.store_all(set);
            const auto bytes = gmem::save_weights(net, parse_dtype(train_dtype));
            gmem::write_file(train_out, bytes);
            std::cout << "stored " << net.size() << " patterns, wrote " << bytes.size()
                      << " bytes to " << train_out << "\n";
        } else if (*recall) {
            const gmem::MemoryNet net = load_net(recall_weights, recall_tau);
            const gmem::BitPattern pattern = gmem::load_pbm(gmem::read_file(recall_probe));
            if (!(recall_keep > 0.0) || recall_keep > 1.0)
                throw std::invalid_argument("--keep must be in (0, 1]");
            const gmem::MaskedPattern masked =
                recall_keep < 1.0
                    ? gmem::occlude(pattern, gmem::RegionSpec::bottom_right(recall_keep))
                    : gmem::present_all(pattern);
            const gmem::RecallResult r = net.recall(masked, parse_norm(recall_norm));
            std::cout << "winner=" << r.winner << " score=" << r.winner_score
                      << " accepted=" << (r.accepted ? "yes" : "no")
                      << " presented=" << r.presented_count << "\n";
            if (!recall_emit.empty())
                gmem::write_file(recall_emit, gmem::save_pbm(net.reconstruct(r.winner), false));
            return r.accepted ? 0 : 2;
        } else if (*evaluate) {
            const gmem::MemoryNet net = load_net(eval_weights, eval_tau);
            const gmem::PatternSet set = gmem::load_pattern_dir(eval_corpus);
            const gmem::ExperimentReport report =
                gmem::run_full_recall(net, set, parse_norm(eval_norm));
            const std::string path = report_path(eval_out, "full_recall");
            write_report(report, path);
            std::cout << "probes=" << report.summary.probes
                      << " correct=" << report.summary.correct
                      << " accuracy=" << report.summary.accuracy
                      << " max_score=" << report.summary.max_score
                      << " min_score=" << report.summary.min_score << "\n"
                      << "report: " << path << "\n";
        } else if (*sweep) {
            const gmem::MemoryNet net = load_net(sweep_weights, sweep_tau);
            const gmem::PatternSet set = gmem::load_pattern_dir(sweep_corpus);
            const std::vector<double> fractions = parse_fractions(sweep_fractions);
            const gmem::ExperimentReport report = gmem::run_occlusion_sweep(
                net, set, fractions, parse_corner(sweep_corner), parse_norm(sweep_norm));
            const std::string path = report_path(sweep_out, "occlusion_sweep");
            write_report(report, path);
            for (const auto& [fraction, accuracy] : report.summary.fraction_accuracy)
                std::cout << "fraction=" << fraction << " accuracy=" << accuracy << "\n";
            if (report.summary.failure_fraction)
                std::cout << "failure_fraction=" << *report.summary.failure_fraction << "\n";
            else
                std::cout << "failure_fraction=none\n";
            std::cout << "report: " << path << "\n";
        } else if (*probe) {
            const gmem::MemoryNet net = load_net(probe_weights, probe_tau);
            const gmem::PatternSet set = gmem::load_pattern_dir(probe_corpus);
            const gmem::BitPattern unknown = gmem::load_pbm(gmem::read_file(probe_unknown));
            const gmem::ExperimentReport report =
                gmem::run_unknown_probe(net, set, unknown, parse_norm(probe_norm));
            const gmem::ProbeOutcome& row = report.rows.front();
            std::cout << "winner=" << row.winner << " max_score=" << row.score << " "
                      << (row.accepted ? "accepted" : "rejected") << "\n";
            const std::string path = report_path(probe_out, "unknown_probe");
            write_report(report, path);
            std::cout << "report: " << path << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
