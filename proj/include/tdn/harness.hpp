#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdn/baselines.hpp"
#include "tdn/datagen.hpp"
#include "tdn/denoise.hpp"

namespace tdn {

enum class Method { hooi, als, wiener, amp, slicerank, xrank };

std::string to_string(Method m);
Method method_from_string(const std::string& s);
std::string to_string(SweepSelection s);

/// Hyperparameter ranges searched per cell for the stable-rank methods, plus
/// the fixed amplification settings.
struct HyperGrid {
    std::vector<double> lambdas{0.01, 0.1, 1.0, 10.0};
    std::vector<double> accs{0.90, 0.95};
    int m = 5;                // amplifications per round
    double tau = 1.0;         // deflation stop fraction of ||T||
    int max_components = 1;   // deflation pieces
    int max_sweeps = 200;     // sweep bound for slicerank/xrank
};

/// One experiment: a synthetic grid (or a pre-generated corpus manifest), the
/// methods to run, and the execution knobs.
struct ExperimentSpec {
    std::vector<Variant> variants{Variant::uniform};
    std::vector<int> orders{3};
    std::vector<int> sizes{5, 10, 25};
    std::vector<int> ranks{1, 2, 3, 4, 5};
    std::vector<double> snrs{20, 10, 5, 1, -1, -5, -10, -20};
    std::vector<Method> methods{Method::hooi, Method::als,       Method::wiener,
                                Method::amp,  Method::slicerank, Method::xrank};
    HyperGrid grid;
    SweepSelection selection = SweepSelection::oracle;
    int trials = 20;
    std::uint64_t base_seed = 1;
    std::string manifest;  // when non-empty, load NoisyPairs from this corpus
    int threads = 1;

    void validate() const;
};

/// One denoising run. Wall time is reported in the JSON stream only so CSV
/// outputs stay byte-identical across reruns.
struct TrialRecord {
    Variant variant = Variant::uniform;
    int order = 0, rank = 0, size = 0;
    double snr_db = 0.0;
    Method method = Method::hooi;
    std::optional<double> lambda, acc;  // stable-rank hyperparameters
    std::optional<int> m;               // amplification rounds
    std::optional<double> tau;
    std::string selection;  // oracle/literal for the sweep methods
    int trial = 0;
    std::uint64_t seed = 0;
    double input_snr_db = 0.0;
    double denoised_snr_db = 0.0;
    std::optional<double> rank_statistic;
    int iterations = 0;
    bool converged = false;
    double wall_time_ms = 0.0;
    bool failed = false;
    std::string error;
};

struct SummaryRow {
    double snr_db = 0.0;
    Method method = Method::hooi;
    double mean = 0.0;
    double sd = 0.0;        // sample SD (n-1), 0 for singleton groups
    std::size_t count = 0;  // records included
    std::size_t excluded = 0;  // failed or infinite-SNR records left out
};

struct SeriesPoint {
    double key = 0.0;  // size or rank
    double mean = 0.0;
    std::size_t count = 0;
};

/// One pre-generated corpus entry (see `gen` / `ecg-tensorize`).
struct ManifestEntry {
    Variant variant = Variant::uniform;
    int order = 0, rank = 0, size = 0;
    double snr_db = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    std::string clean_path, noisy_path;
    double realized_snr_db = 0.0;
};

void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::string& path);

/// Generate the corpus of a spec to `out_dir` (tensor files + manifest.csv).
std::vector<ManifestEntry> generate_corpus(const ExperimentSpec& spec, const std::string& out_dir);

/// Execute the experiment: every grid cell and trial, every method, with the
/// per-cell hyperparameter grid search scored by denoised SNR. Per-trial
/// failures become failed records rather than aborting the sweep. Fully
/// deterministic given the base seed.
std::vector<TrialRecord> run_experiment(const ExperimentSpec& spec);

/// Group records by (starting SNR, method); optionally restrict to the
/// low-rank/noisy slice (rank <= 2, SNR <= 1).
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records,
                                  bool lowrank_noisy_only = false);

/// Mean denoised SNR keyed by tensor size or rank, one series per method.
std::map<Method, std::vector<SeriesPoint>> series_by(const std::vector<TrialRecord>& records,
                                                     const std::string& key);

void emit_records_csv(const std::string& path, const std::vector<TrialRecord>& records);
void emit_records_json(const std::string& path, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_records_csv(const std::string& path);
void emit_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);
void emit_series_svg(const std::string& path, const std::string& x_label,
                     const std::map<Method, std::vector<SeriesPoint>>& series);

/// run_experiment + all standard outputs (records, summaries, optional SVGs)
/// under `out_dir`.
std::vector<TrialRecord> run_and_emit(const ExperimentSpec& spec, const std::string& out_dir,
                                      bool plots);

}  // namespace tdn
