#include "tdn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "tdn/amplification.hpp"
#include "tdn/io.hpp"
#include "tdn/rng.hpp"
#include "tdn/tensor_ops.hpp"

namespace tdn {

namespace fs = std::filesystem;

std::string to_string(Method m) {
    switch (m) {
        case Method::hooi: return "hooi";
        case Method::als: return "als";
        case Method::wiener: return "wiener";
        case Method::amp: return "amp";
        case Method::slicerank: return "slicerank";
        case Method::xrank: return "xrank";
    }
    return "?";
}

Method method_from_string(const std::string& s) {
    if (s == "hooi") return Method::hooi;
    if (s == "als") return Method::als;
    if (s == "wiener") return Method::wiener;
    if (s == "amp") return Method::amp;
    if (s == "slicerank") return Method::slicerank;
    if (s == "xrank") return Method::xrank;
    throw std::invalid_argument("unknown method '" + s + "'");
}

std::string to_string(SweepSelection s) {
    return s == SweepSelection::oracle ? "oracle" : "literal";
}

void ExperimentSpec::validate() const {
    if (manifest.empty()) {
        if (variants.empty() || orders.empty() || sizes.empty() || ranks.empty() || snrs.empty())
            throw std::invalid_argument("ExperimentSpec: empty grid dimension");
        for (int o : orders)
            if (o != 3 && o != 4) throw std::invalid_argument("ExperimentSpec: order must be 3 or 4");
        if (trials < 1) throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
    }
    if (methods.empty()) throw std::invalid_argument("ExperimentSpec: no methods selected");
    if (grid.lambdas.empty() || grid.accs.empty())
        throw std::invalid_argument("ExperimentSpec: empty hyperparameter grid");
    if (threads < 1) throw std::invalid_argument("ExperimentSpec: threads must be >= 1");
}

namespace {

struct CellKey {
    Variant variant;
    int order, rank, size;
    double snr_db;
};

std::uint64_t cell_trial_seed(std::uint64_t base, const CellKey& c, int trial) {
    std::uint64_t h = derive_seed(base, static_cast<std::uint64_t>(c.variant),
                                  static_cast<std::uint64_t>(c.order),
                                  static_cast<std::uint64_t>(c.rank));
    return derive_seed(h, static_cast<std::uint64_t>(c.size), std::bit_cast<std::uint64_t>(c.snr_db),
                       static_cast<std::uint64_t>(trial));
}

bool method_is_gridded(Method m) { return m == Method::slicerank || m == Method::xrank; }

struct RunResult {
    TrialRecord record;
};

TrialRecord base_record(const CellKey& c, Method m, int trial, std::uint64_t seed) {
    TrialRecord r;
    r.variant = c.variant;
    r.order = c.order;
    r.rank = c.rank;
    r.size = c.size;
    r.snr_db = c.snr_db;
    r.method = m;
    r.trial = trial;
    r.seed = seed;
    return r;
}

double snr_of(const DenseTensor& clean, const DenseTensor& denoised) {
    return measure_snr_db(clean, denoised);
}

// Runs one method with fixed hyperparameters on one pair, capturing failures
// as failed records.
TrialRecord run_single(const ExperimentSpec& spec, const CellKey& cell, Method method, int trial,
                       std::uint64_t seed, const NoisyPair& pair, double lambda, double acc) {
    TrialRecord rec = base_record(cell, method, trial, seed);
    rec.input_snr_db = measure_snr_db(pair.clean, pair.noisy);
    auto t0 = std::chrono::steady_clock::now();
    try {
        switch (method) {
            case Method::hooi:
            case Method::als: {
                rec.selection = to_string(spec.selection);
                DenoiseOutcome out =
                    rank_sweep(pair.noisy, method == Method::hooi ? SweepMethod::hooi : SweepMethod::cp,
                               spec.selection, &pair.clean, 1e-4, 50, seed);
                rec.denoised_snr_db = snr_of(pair.clean, out.denoised);
                rec.rank_statistic = out.rank_statistic;
                rec.iterations = out.iterations;
                rec.converged = out.converged;
                break;
            }
            case Method::wiener: {
                DenoiseOutcome out = multiway_wiener(pair.noisy);
                rec.denoised_snr_db = snr_of(pair.clean, out.denoised);
                rec.iterations = out.iterations;
                rec.converged = out.converged;
                break;
            }
            case Method::amp: {
                rec.m = spec.grid.m;
                rec.tau = spec.grid.tau;
                DenoiseOutcome out = denoise_amplification(pair.noisy, phi_sigma4_map(), spec.grid.m,
                                                           spec.grid.tau, spec.grid.max_components);
                rec.denoised_snr_db = snr_of(pair.clean, out.denoised);
                rec.iterations = out.iterations;
                rec.converged = out.converged;
                break;
            }
            case Method::slicerank:
            case Method::xrank: {
                rec.lambda = lambda;
                rec.acc = acc;
                StableRankConfig cfg{lambda, acc, spec.grid.max_sweeps};
                DenoiseOutcome out = method == Method::slicerank ? denoise_slicerank(pair.noisy, cfg)
                                                                 : denoise_xrank(pair.noisy, cfg);
                rec.denoised_snr_db = snr_of(pair.clean, out.denoised);
                rec.rank_statistic = out.rank_statistic;
                rec.iterations = out.iterations;
                rec.converged = out.converged;
                break;
            }
        }
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
        rec.denoised_snr_db = -std::numeric_limits<double>::infinity();
    }
    auto t1 = std::chrono::steady_clock::now();
    rec.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return rec;
}

// All method runs for one trial: gridded methods produce one record per
// hyperparameter combination, in grid enumeration order.
struct TrialResults {
    std::vector<std::vector<TrialRecord>> per_method;  // aligned with spec.methods
};

TrialResults run_trial(const ExperimentSpec& spec, const CellKey& cell, int trial,
                       std::uint64_t seed, const NoisyPair& pair) {
    TrialResults out;
    out.per_method.resize(spec.methods.size());
    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
        Method m = spec.methods[mi];
        if (method_is_gridded(m)) {
            for (double lambda : spec.grid.lambdas)
                for (double acc : spec.grid.accs)
                    out.per_method[mi].push_back(run_single(spec, cell, m, trial, seed, pair, lambda, acc));
        } else {
            out.per_method[mi].push_back(run_single(spec, cell, m, trial, seed, pair, 0, 0));
        }
    }
    return out;
}

std::vector<CellKey> grid_cells(const ExperimentSpec& spec) {
    std::vector<CellKey> cells;
    for (Variant v : spec.variants)
        for (int o : spec.orders)
            for (int s : spec.sizes)
                for (int r : spec.ranks)
                    for (double snr : spec.snrs) cells.push_back(CellKey{v, o, r, s, snr});
    return cells;
}

// Grid-search score for one hyperparameter combination: mean capped SNR with a
// heavy penalty for failed trials, so a combo that errors never wins.
double combo_score(const std::vector<std::vector<TrialRecord>>& trials, std::size_t combo) {
    double acc = 0.0;
    for (const auto& t : trials) {
        const TrialRecord& r = t[combo];
        if (r.failed)
            acc += -1e6;
        else
            acc += std::min(r.denoised_snr_db, 1e6);
    }
    return acc / static_cast<double>(trials.size());
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string sanitize_csv(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '"') c = ';';
    return s;
}

}  // namespace

std::vector<TrialRecord> run_experiment(const ExperimentSpec& spec) {
    spec.validate();

    // Assemble the work list: per (cell, trial) either a generator seed or a
    // manifest entry to load.
    std::vector<CellKey> cells;
    std::vector<std::vector<std::uint64_t>> seeds;            // [cell][trial]
    std::vector<std::vector<const ManifestEntry*>> sources;   // null when generated
    std::vector<ManifestEntry> manifest_entries;

    if (spec.manifest.empty()) {
        cells = grid_cells(spec);
        seeds.assign(cells.size(), std::vector<std::uint64_t>(spec.trials));
        sources.assign(cells.size(), std::vector<const ManifestEntry*>(spec.trials, nullptr));
        for (std::size_t ci = 0; ci < cells.size(); ++ci)
            for (int t = 0; t < spec.trials; ++t)
                seeds[ci][static_cast<std::size_t>(t)] = cell_trial_seed(spec.base_seed, cells[ci], t);
    } else {
        manifest_entries = read_manifest(spec.manifest);
        if (manifest_entries.empty()) throw std::runtime_error("run_experiment: empty manifest");
        auto key_of = [](const ManifestEntry& e) {
            return CellKey{e.variant, e.order, e.rank, e.size, e.snr_db};
        };
        auto same = [](const CellKey& a, const CellKey& b) {
            return a.variant == b.variant && a.order == b.order && a.rank == b.rank &&
                   a.size == b.size && a.snr_db == b.snr_db;
        };
        for (const ManifestEntry& e : manifest_entries) {
            CellKey k = key_of(e);
            std::size_t ci = cells.size();
            for (std::size_t i = 0; i < cells.size(); ++i)
                if (same(cells[i], k)) {
                    ci = i;
                    break;
                }
            if (ci == cells.size()) {
                cells.push_back(k);
                seeds.emplace_back();
                sources.emplace_back();
            }
            seeds[ci].push_back(e.seed);
            sources[ci].push_back(&e);
        }
    }

    // results[cell][trial]
    std::vector<std::vector<TrialResults>> results(cells.size());
    struct Job {
        std::size_t cell;
        std::size_t trial;
    };
    std::vector<Job> jobs;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        results[ci].resize(seeds[ci].size());
        for (std::size_t t = 0; t < seeds[ci].size(); ++t) jobs.push_back(Job{ci, t});
    }

    auto run_job = [&](const Job& job) {
        const CellKey& cell = cells[job.cell];
        std::uint64_t seed = seeds[job.cell][job.trial];
        try {
            NoisyPair pair = [&]() {
                if (sources[job.cell][job.trial] != nullptr) {
                    const ManifestEntry& e = *sources[job.cell][job.trial];
                    DenseTensor clean = read_tensor(e.clean_path);
                    DenseTensor noisy = read_tensor(e.noisy_path);
                    return NoisyPair{std::move(clean), std::move(noisy), e.realized_snr_db};
                }
                Rng rng(seed);
                SyntheticSpec s{cell.order, cell.rank, cell.size, cell.snr_db, cell.variant, seed};
                DenseTensor clean = gen_synthetic(s, rng);
                return add_noise_to_snr(clean, cell.snr_db, rng);
            }();
            results[job.cell][job.trial] =
                run_trial(spec, cell, static_cast<int>(job.trial), seed, pair);
        } catch (const std::exception& e) {
            // Pair construction failed: mark every method failed for this trial.
            TrialResults tr;
            tr.per_method.resize(spec.methods.size());
            for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
                std::size_t combos = method_is_gridded(spec.methods[mi])
                                         ? spec.grid.lambdas.size() * spec.grid.accs.size()
                                         : 1;
                for (std::size_t c = 0; c < combos; ++c) {
                    TrialRecord r = base_record(cells[job.cell], spec.methods[mi],
                                                static_cast<int>(job.trial), seed);
                    r.failed = true;
                    r.error = e.what();
                    r.denoised_snr_db = -std::numeric_limits<double>::infinity();
                    tr.per_method[mi].push_back(std::move(r));
                }
            }
            results[job.cell][job.trial] = std::move(tr);
        }
    };

    if (spec.threads <= 1) {
        for (const Job& j : jobs) run_job(j);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                std::size_t k = next.fetch_add(1);
                if (k >= jobs.size()) return;
                run_job(jobs[k]);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < spec.threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Per cell and gridded method, keep the hyperparameter combination with
    // the best mean denoised SNR; the winning (lambda, acc) stays visible in
    // the emitted records.
    std::vector<TrialRecord> records;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
            std::vector<std::vector<TrialRecord>> trials;  // [trial][combo]
            for (auto& tr : results[ci]) trials.push_back(tr.per_method[mi]);
            if (trials.empty()) continue;
            std::size_t combos = trials[0].size();
            std::size_t best = 0;
            if (combos > 1) {
                double best_score = -std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < combos; ++c) {
                    double s = combo_score(trials, c);
                    if (s > best_score) {
                        best_score = s;
                        best = c;
                    }
                }
            }
            for (auto& t : trials) records.push_back(std::move(t[best]));
        }
    }
    return records;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records, bool lowrank_noisy_only) {
    if (records.empty()) throw std::invalid_argument("summarize: no records");
    struct Acc {
        std::vector<double> values;
        std::size_t excluded = 0;
    };
    std::map<std::pair<double, int>, Acc> groups;  // key: (-snr, method) for ordering
    for (const TrialRecord& r : records) {
        if (lowrank_noisy_only && !(r.rank <= 2 && r.snr_db <= 1.0)) continue;
        Acc& g = groups[{-r.snr_db, static_cast<int>(r.method)}];
        if (r.failed || std::isinf(r.denoised_snr_db))
            g.excluded++;
        else
            g.values.push_back(r.denoised_snr_db);
    }
    std::vector<SummaryRow> rows;
    for (const auto& [key, acc] : groups) {
        SummaryRow row;
        row.snr_db = -key.first;
        row.method = static_cast<Method>(key.second);
        row.count = acc.values.size();
        row.excluded = acc.excluded;
        if (!acc.values.empty()) {
            double mean = 0.0;
            for (double v : acc.values) mean += v;
            mean /= static_cast<double>(acc.values.size());
            double ss = 0.0;
            for (double v : acc.values) ss += (v - mean) * (v - mean);
            row.mean = mean;
            row.sd = acc.values.size() > 1
                         ? std::sqrt(ss / static_cast<double>(acc.values.size() - 1))
                         : 0.0;
        }
        rows.push_back(row);
    }
    return rows;
}

std::map<Method, std::vector<SeriesPoint>> series_by(const std::vector<TrialRecord>& records,
                                                     const std::string& key) {
    if (key != "size" && key != "rank") throw std::invalid_argument("series_by: key must be size or rank");
    std::map<Method, std::map<double, std::pair<double, std::size_t>>> acc;
    for (const TrialRecord& r : records) {
        if (r.failed || std::isinf(r.denoised_snr_db)) continue;
        double k = key == "size" ? r.size : r.rank;
        auto& cell = acc[r.method][k];
        cell.first += r.denoised_snr_db;
        cell.second += 1;
    }
    std::map<Method, std::vector<SeriesPoint>> out;
    for (const auto& [m, pts] : acc) {
        for (const auto& [k, sum_count] : pts)
            out[m].push_back(SeriesPoint{k, sum_count.first / static_cast<double>(sum_count.second),
                                         sum_count.second});
    }
    return out;
}

namespace {

const char* kRecordsHeader =
    "variant,order,size,rank,snr_db,method,selection,lambda,acc,m,tau,trial,seed,"
    "input_snr_db,denoised_snr_db,rank_statistic,iterations,converged,failed,error";

}  // namespace

void emit_records_csv(const std::string& path, const std::vector<TrialRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_records_csv: cannot open '" + path + "'");
    out << kRecordsHeader << '\n';
    for (const TrialRecord& r : records) {
        out << to_string(r.variant) << ',' << r.order << ',' << r.size << ',' << r.rank << ','
            << format_double(r.snr_db) << ',' << to_string(r.method) << ',' << r.selection << ','
            << (r.lambda ? format_double(*r.lambda) : "") << ','
            << (r.acc ? format_double(*r.acc) : "") << ',' << (r.m ? std::to_string(*r.m) : "")
            << ',' << (r.tau ? format_double(*r.tau) : "") << ',' << r.trial << ',' << r.seed << ','
            << format_double(r.input_snr_db) << ',' << format_double(r.denoised_snr_db) << ','
            << (r.rank_statistic ? format_double(*r.rank_statistic) : "") << ',' << r.iterations
            << ',' << (r.converged ? 1 : 0) << ',' << (r.failed ? 1 : 0) << ','
            << sanitize_csv(r.error) << '\n';
    }
    if (!out) throw std::runtime_error("emit_records_csv: write failed for '" + path + "'");
}

std::vector<TrialRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_records_csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != kRecordsHeader)
        throw std::runtime_error("read_records_csv: unexpected header in '" + path + "'");
    std::vector<TrialRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        f.resize(20);
        TrialRecord r;
        r.variant = variant_from_string(f[0]);
        r.order = std::stoi(f[1]);
        r.size = std::stoi(f[2]);
        r.rank = std::stoi(f[3]);
        r.snr_db = std::stod(f[4]);
        r.method = method_from_string(f[5]);
        r.selection = f[6];
        if (!f[7].empty()) r.lambda = std::stod(f[7]);
        if (!f[8].empty()) r.acc = std::stod(f[8]);
        if (!f[9].empty()) r.m = std::stoi(f[9]);
        if (!f[10].empty()) r.tau = std::stod(f[10]);
        r.trial = std::stoi(f[11]);
        r.seed = std::stoull(f[12]);
        r.input_snr_db = std::stod(f[13]);
        r.denoised_snr_db = std::stod(f[14]);
        if (!f[15].empty()) r.rank_statistic = std::stod(f[15]);
        r.iterations = std::stoi(f[16]);
        r.converged = f[17] == "1";
        r.failed = f[18] == "1";
        r.error = f[19];
        records.push_back(std::move(r));
    }
    return records;
}

void emit_records_json(const std::string& path, const std::vector<TrialRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const TrialRecord& r : records) {
        nlohmann::json j{{"variant", to_string(r.variant)},
                         {"order", r.order},
                         {"size", r.size},
                         {"rank", r.rank},
                         {"snr_db", r.snr_db},
                         {"method", to_string(r.method)},
                         {"selection", r.selection},
                         {"trial", r.trial},
                         {"seed", r.seed},
                         {"input_snr_db", r.input_snr_db},
                         {"iterations", r.iterations},
                         {"converged", r.converged},
                         {"wall_time_ms", r.wall_time_ms},
                         {"failed", r.failed},
                         {"error", r.error}};
        if (std::isinf(r.denoised_snr_db))
            j["denoised_snr_db"] = r.denoised_snr_db > 0 ? "inf" : "-inf";
        else
            j["denoised_snr_db"] = r.denoised_snr_db;
        if (r.lambda) j["lambda"] = *r.lambda;
        if (r.acc) j["acc"] = *r.acc;
        if (r.m) j["m"] = *r.m;
        if (r.tau) j["tau"] = *r.tau;
        if (r.rank_statistic) j["rank_statistic"] = *r.rank_statistic;
        arr.push_back(std::move(j));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_records_json: cannot open '" + path + "'");
    out << arr.dump(1) << '\n';
    if (!out) throw std::runtime_error("emit_records_json: write failed for '" + path + "'");
}

void emit_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_summary_csv: cannot open '" + path + "'");
    out << "snr_db,method,mean_denoised_snr_db,sd_denoised_snr_db,count,excluded\n";
    for (const SummaryRow& r : rows) {
        out << format_double(r.snr_db) << ',' << to_string(r.method) << ',' << format_double(r.mean)
            << ',' << format_double(r.sd) << ',' << r.count << ',' << r.excluded << '\n';
    }
    if (!out) throw std::runtime_error("emit_summary_csv: write failed for '" + path + "'");
}

void emit_series_svg(const std::string& path, const std::string& x_label,
                     const std::map<Method, std::vector<SeriesPoint>>& series) {
    const double W = 720, H = 480, ML = 70, MR = 160, MT = 30, MB = 60;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (const auto& [m, pts] : series)
        for (const SeriesPoint& p : pts) {
            xmin = std::min(xmin, p.key);
            xmax = std::max(xmax, p.key);
            ymin = std::min(ymin, p.mean);
            ymax = std::max(ymax, p.mean);
        }
    bool empty = !std::isfinite(xmin);
    if (empty) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    double ypad = 0.05 * (ymax - ymin + 1e-9);
    ymin -= ypad;
    ymax += ypad;

    auto X = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto Y = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                    "#d62728", "#9467bd", "#8c564b"};

    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_series_svg: cannot open '" + path + "'");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    // axes
    out << "<line x1=\"" << ML << "\" y1=\"" << (H - MB) << "\" x2=\"" << (W - MR) << "\" y2=\""
        << (H - MB) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << (H - MB)
        << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        double yv = ymin + (ymax - ymin) * k / 5.0;
        out << "<line x1=\"" << (ML - 4) << "\" y1=\"" << Y(yv) << "\" x2=\"" << (W - MR)
            << "\" y2=\"" << Y(yv) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << (ML - 8) << "\" y=\"" << (Y(yv) + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
    }
    out << "<text x=\"" << (ML + (W - ML - MR) / 2) << "\" y=\"" << (H - 15)
        << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << (MT + (H - MT - MB) / 2)
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << (MT + (H - MT - MB) / 2) << ")\">denoised SNR (dB)</text>\n";

    std::size_t si = 0;
    for (const auto& [m, pts] : series) {
        const char* color = palette[static_cast<std::size_t>(m) % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const SeriesPoint& p : pts) out << fmt(X(p.key)) << ',' << fmt(Y(p.mean)) << ' ';
        out << "\"/>\n";
        for (const SeriesPoint& p : pts)
            out << "<circle cx=\"" << fmt(X(p.key)) << "\" cy=\"" << fmt(Y(p.mean))
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        double ly = MT + 18.0 * static_cast<double>(si + 1);
        out << "<line x1=\"" << (W - MR + 12) << "\" y1=\"" << ly << "\" x2=\"" << (W - MR + 34)
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << (W - MR + 40) << "\" y=\"" << (ly + 4) << "\" font-size=\"12\">"
            << to_string(m) << "</text>\n";
        // x ticks from the first series only
        if (si == 0)
            for (const SeriesPoint& p : pts)
                out << "<text x=\"" << fmt(X(p.key)) << "\" y=\"" << (H - MB + 16)
                    << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(p.key) << "</text>\n";
        ++si;
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("emit_series_svg: write failed for '" + path + "'");
}

void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_manifest: cannot open '" + path + "'");
    out << "variant,order,rank,size,snr_db,trial,seed,clean_path,noisy_path,realized_snr_db\n";
    for (const ManifestEntry& e : entries) {
        out << to_string(e.variant) << ',' << e.order << ',' << e.rank << ',' << e.size << ','
            << format_double(e.snr_db) << ',' << e.trial << ',' << e.seed << ',' << e.clean_path
            << ',' << e.noisy_path << ',' << format_double(e.realized_snr_db) << '\n';
    }
    if (!out) throw std::runtime_error("write_manifest: write failed for '" + path + "'");
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_manifest: cannot open '" + path + "'");
    std::string line;
    std::getline(in, line);  // header
    std::vector<ManifestEntry> entries;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        if (f.size() != 10) throw std::runtime_error("read_manifest: malformed row in '" + path + "'");
        ManifestEntry e;
        e.variant = variant_from_string(f[0]);
        e.order = std::stoi(f[1]);
        e.rank = std::stoi(f[2]);
        e.size = std::stoi(f[3]);
        e.snr_db = std::stod(f[4]);
        e.trial = std::stoi(f[5]);
        e.seed = std::stoull(f[6]);
        e.clean_path = f[7];
        e.noisy_path = f[8];
        e.realized_snr_db = std::stod(f[9]);
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<ManifestEntry> generate_corpus(const ExperimentSpec& spec, const std::string& out_dir) {
    spec.validate();
    if (!spec.manifest.empty())
        throw std::invalid_argument("generate_corpus: spec already references a manifest");
    fs::create_directories(out_dir);
    std::vector<ManifestEntry> entries;
    std::vector<CellKey> cells = grid_cells(spec);
    char name[160];
    for (const CellKey& cell : cells) {
        for (int t = 0; t < spec.trials; ++t) {
            std::uint64_t seed = cell_trial_seed(spec.base_seed, cell, t);
            Rng rng(seed);
            SyntheticSpec s{cell.order, cell.rank, cell.size, cell.snr_db, cell.variant, seed};
            DenseTensor clean = gen_synthetic(s, rng);
            NoisyPair pair = add_noise_to_snr(clean, cell.snr_db, rng);
            std::snprintf(name, sizeof name, "%s_o%d_s%d_r%d_snr%g_t%03d", to_string(cell.variant).c_str(),
                          cell.order, cell.size, cell.rank, cell.snr_db, t);
            ManifestEntry e;
            e.variant = cell.variant;
            e.order = cell.order;
            e.rank = cell.rank;
            e.size = cell.size;
            e.snr_db = cell.snr_db;
            e.trial = t;
            e.seed = seed;
            e.clean_path = (fs::path(out_dir) / (std::string(name) + "_clean.txt")).string();
            e.noisy_path = (fs::path(out_dir) / (std::string(name) + "_noisy.txt")).string();
            e.realized_snr_db = pair.realized_snr_db;
            write_tensor(e.clean_path, pair.clean);
            write_tensor(e.noisy_path, pair.noisy);
            entries.push_back(std::move(e));
        }
    }
    write_manifest((fs::path(out_dir) / "manifest.csv").string(), entries);
    return entries;
}

std::vector<TrialRecord> run_and_emit(const ExperimentSpec& spec, const std::string& out_dir,
                                      bool plots) {
    fs::create_directories(out_dir);
    std::vector<TrialRecord> records = run_experiment(spec);
    auto p = [&](const char* f) { return (fs::path(out_dir) / f).string(); };
    emit_records_csv(p("records.csv"), records);
    emit_records_json(p("records.json"), records);
    if (!records.empty()) {
        emit_summary_csv(p("summary_overall.csv"), summarize(records, false));
        std::vector<SummaryRow> low = summarize(records, true);
        if (!low.empty()) emit_summary_csv(p("summary_lowrank.csv"), low);
        auto series_csv = [&](const std::string& key, const char* file) {
            auto series = series_by(records, key);
            std::ofstream out(p(file));
            if (!out) throw std::runtime_error("run_and_emit: cannot open summary file");
            out << key << ",method,mean_denoised_snr_db,count\n";
            for (const auto& [m, pts] : series)
                for (const SeriesPoint& pt : pts)
                    out << format_double(pt.key) << ',' << to_string(m) << ','
                        << format_double(pt.mean) << ',' << pt.count << '\n';
        };
        series_csv("size", "summary_by_size.csv");
        series_csv("rank", "summary_by_rank.csv");
        if (plots) {
            emit_series_svg(p("snr_vs_size.svg"), "tensor size", series_by(records, "size"));
            emit_series_svg(p("snr_vs_rank.svg"), "tensor rank", series_by(records, "rank"));
        }
    }
    return records;
}

}  // namespace tdn
