// Command-line driver: corpus generation, benchmark runs, summaries, plots,
// and ECG tensorization.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdn/datagen.hpp"
#include "tdn/ecg.hpp"
#include "tdn/harness.hpp"
#include "tdn/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string default_out_root() {
    const char* env = std::getenv("TDN_OUTPUT_ROOT");
    return env != nullptr ? std::string(env) : std::string(".");
}

void add_grid_options(CLI::App* cmd, tdn::ExperimentSpec& spec, std::vector<std::string>& variants,
                      std::vector<std::string>& methods, std::string& selection) {
    cmd->add_option("--variants", variants, "tensor variants (uniform, nonuniform)");
    cmd->add_option("--orders", spec.orders, "tensor orders (3, 4)");
    cmd->add_option("--sizes", spec.sizes, "mode extents");
    cmd->add_option("--ranks", spec.ranks, "CP ranks of the clean tensors");
    cmd->add_option("--snrs", spec.snrs, "target SNRs in dB");
    cmd->add_option("--methods", methods, "hooi, als, wiener, amp, slicerank, xrank");
    cmd->add_option("--trials", spec.trials, "trials per grid cell");
    cmd->add_option("--seed", spec.base_seed, "base seed");
    cmd->add_option("--selection", selection, "rank sweep selection: oracle or literal");
    cmd->add_option("--lambdas", spec.grid.lambdas, "slicerank/xrank lambda grid");
    cmd->add_option("--accs", spec.grid.accs, "slicerank/xrank accuracy grid");
    cmd->add_option("--m", spec.grid.m, "amplifications per round");
    cmd->add_option("--tau", spec.grid.tau, "deflation stop fraction of ||T||");
    cmd->add_option("--max-components", spec.grid.max_components, "deflation component cap");
    cmd->add_option("--max-sweeps", spec.grid.max_sweeps, "slicerank/xrank sweep cap");
    cmd->add_option("--threads", spec.threads, "worker threads");
}

void finalize_spec(tdn::ExperimentSpec& spec, const std::vector<std::string>& variants,
                   const std::vector<std::string>& methods, const std::string& selection) {
    if (!variants.empty()) {
        spec.variants.clear();
        for (const auto& v : variants) spec.variants.push_back(tdn::variant_from_string(v));
    }
    if (!methods.empty()) {
        spec.methods.clear();
        for (const auto& m : methods) spec.methods.push_back(tdn::method_from_string(m));
    }
    if (selection == "literal")
        spec.selection = tdn::SweepSelection::literal;
    else if (selection == "oracle")
        spec.selection = tdn::SweepSelection::oracle;
    else if (!selection.empty())
        throw CLI::ValidationError("--selection must be oracle or literal");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tensor denoising benchmark harness"};
    app.require_subcommand(1);
    // config keys live in a section named after the subcommand, e.g.
    //   [run]
    //   sizes=5 10
    //   trials=20
    app.set_config("--config", "", "read options from a config file (place before the subcommand)");

    // ---- gen ----------------------------------------------------------------
    tdn::ExperimentSpec gen_spec;
    std::vector<std::string> gen_variants, gen_methods;
    std::string gen_selection;
    std::string gen_out = default_out_root() + "/corpus";
    auto* gen = app.add_subcommand("gen", "generate a synthetic corpus with a manifest");
    add_grid_options(gen, gen_spec, gen_variants, gen_methods, gen_selection);
    gen->add_option("--out", gen_out, "corpus output directory");

    // ---- run ----------------------------------------------------------------
    tdn::ExperimentSpec run_spec;
    std::vector<std::string> run_variants, run_methods;
    std::string run_selection;
    std::string run_out = default_out_root() + "/results";
    bool run_plots = false;
    auto* run = app.add_subcommand("run", "run denoisers over a grid or a corpus manifest");
    add_grid_options(run, run_spec, run_variants, run_methods, run_selection);
    run->add_option("--manifest", run_spec.manifest, "corpus manifest to load instead of generating");
    run->add_option("--out", run_out, "results output directory");
    run->add_flag("--plots", run_plots, "also emit SVG line plots");

    // ---- summarize ----------------------------------------------------------
    std::string sum_records, sum_out = default_out_root() + "/results";
    auto* sum = app.add_subcommand("summarize", "aggregate a records.csv into summary tables");
    sum->add_option("--records", sum_records, "records.csv produced by run")->required();
    sum->add_option("--out", sum_out, "output directory");

    // ---- plot ---------------------------------------------------------------
    std::string plot_records, plot_out = default_out_root() + "/results";
    auto* plot = app.add_subcommand("plot", "emit SVG line plots from a records.csv");
    plot->add_option("--records", plot_records, "records.csv produced by run")->required();
    plot->add_option("--out", plot_out, "output directory");

    // ---- ecg-tensorize --------------------------------------------------------
    std::string ecg_input, ecg_mode = "full";
    std::string ecg_out = default_out_root() + "/ecg";
    std::vector<double> ecg_snrs;
    std::uint64_t ecg_seed = 1;
    std::uint64_t ecg_synth_seed = 0;
    bool ecg_synth = false;
    auto* ecg = app.add_subcommand("ecg-tensorize",
                                   "build taut-string feature tensors from an ECG record");
    ecg->add_option("--input", ecg_input, "ECG text file (see README for the layout)");
    ecg->add_flag("--synthetic", ecg_synth, "use a built-in synthetic record instead of --input");
    ecg->add_option("--synthetic-seed", ecg_synth_seed, "seed for the synthetic record");
    ecg->add_option("--mode", ecg_mode, "full (5x6x12) or windowed (5x6x12x3)");
    ecg->add_option("--snrs", ecg_snrs, "also emit noisy-signal tensors at these SNRs (dB)");
    ecg->add_option("--seed", ecg_seed, "noise seed");
    ecg->add_option("--out", ecg_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            finalize_spec(gen_spec, gen_variants, gen_methods, gen_selection);
            auto entries = tdn::generate_corpus(gen_spec, gen_out);
            std::cout << "wrote " << entries.size() << " tensor pairs under " << gen_out << "\n";
        } else if (run->parsed()) {
            finalize_spec(run_spec, run_variants, run_methods, run_selection);
            auto records = tdn::run_and_emit(run_spec, run_out, run_plots);
            std::size_t failed = 0;
            for (const auto& r : records) failed += r.failed ? 1 : 0;
            std::cout << "wrote " << records.size() << " trial records (" << failed
                      << " failed) under " << run_out << "\n";
        } else if (sum->parsed()) {
            auto records = tdn::read_records_csv(sum_records);
            fs::create_directories(sum_out);
            tdn::emit_summary_csv((fs::path(sum_out) / "summary_overall.csv").string(),
                                  tdn::summarize(records, false));
            auto low = tdn::summarize(records, true);
            if (!low.empty())
                tdn::emit_summary_csv((fs::path(sum_out) / "summary_lowrank.csv").string(), low);
            std::cout << "summaries written under " << sum_out << "\n";
        } else if (plot->parsed()) {
            auto records = tdn::read_records_csv(plot_records);
            fs::create_directories(plot_out);
            tdn::emit_series_svg((fs::path(plot_out) / "snr_vs_size.svg").string(), "tensor size",
                                 tdn::series_by(records, "size"));
            tdn::emit_series_svg((fs::path(plot_out) / "snr_vs_rank.svg").string(), "tensor rank",
                                 tdn::series_by(records, "rank"));
            std::cout << "plots written under " << plot_out << "\n";
        } else if (ecg->parsed()) {
            if (ecg_mode != "full" && ecg_mode != "windowed")
                throw std::invalid_argument("--mode must be full or windowed");
            tdn::EcgRecord rec = ecg_synth ? tdn::make_synthetic_ecg(ecg_synth_seed)
                                           : tdn::read_ecg_file(ecg_input);
            fs::create_directories(ecg_out);
            auto tensorize = [&](const tdn::EcgRecord& r) {
                return ecg_mode == "full" ? tdn::form_tensor_full(r) : tdn::form_tensor_windowed(r);
            };
            tdn::DenseTensor clean = tensorize(rec);
            std::string clean_path =
                (fs::path(ecg_out) / ("ecg_" + ecg_mode + "_clean.txt")).string();
            tdn::write_tensor(clean_path, clean);
            std::cout << "wrote " << clean_path << "\n";
            std::vector<tdn::ManifestEntry> entries;
            for (double snr : ecg_snrs) {
                tdn::Rng rng(tdn::derive_seed(ecg_seed, std::hash<std::string>{}(rec.id),
                                              static_cast<std::uint64_t>(snr * 1000.0 + 1e6)));
                tdn::EcgRecord noisy_rec = tdn::add_signal_noise(rec, snr, rng);
                tdn::DenseTensor noisy = tensorize(noisy_rec);
                char tag[48];
                std::snprintf(tag, sizeof tag, "ecg_%s_snr%g.txt", ecg_mode.c_str(), snr);
                std::string noisy_path = (fs::path(ecg_out) / tag).string();
                tdn::write_tensor(noisy_path, noisy);
                tdn::ManifestEntry e;
                e.order = static_cast<int>(clean.order());
                e.snr_db = snr;
                e.seed = ecg_seed;
                e.clean_path = clean_path;
                e.noisy_path = noisy_path;
                e.realized_snr_db = tdn::measure_snr_db(clean, noisy);
                entries.push_back(std::move(e));
                std::cout << "wrote " << noisy_path << "\n";
            }
            if (!entries.empty())
                tdn::write_manifest((fs::path(ecg_out) / "manifest.csv").string(), entries);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
