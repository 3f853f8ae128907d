#include "tdn/ecg.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tdn {

void EcgRecord::validate() const {
    if (leads.size() != 12) throw std::invalid_argument("EcgRecord: expected 12 leads");
    if (!(sample_rate > 0)) throw std::invalid_argument("EcgRecord: sample rate must be positive");
    for (const auto& lead : leads)
        if (lead.size() != leads[0].size())
            throw std::invalid_argument("EcgRecord: leads must have equal lengths");
}

namespace {

struct Pt {
    std::size_t i;
    double v;
};

inline double slope(const Pt& a, const Pt& b) {
    return (b.v - a.v) / static_cast<double>(b.i - a.i);
}

// Funnel sweep state. The ceiling chain is kept convex (slopes increasing:
// the path ducks under ceiling contacts) and the floor chain concave (slopes
// decreasing: the path drapes over floor contacts). Before the first forced
// bend there is no apex; a flat line at any level inside [flo, fhi] is still
// optimal.
struct Funnel {
    std::deque<Pt> ceil_chain;
    std::deque<Pt> floor_chain;
    std::vector<Pt> committed;
    Pt apex{0, 0.0};
    bool have_apex = false;

    // flat corridor while edge phase lasts
    double flo, fhi;
    std::size_t arg_flo = 0, arg_fhi = 0;

    void push_ceil(Pt p) {
        auto& ch = ceil_chain;
        while (ch.size() >= 2 && slope(ch[ch.size() - 2], ch.back()) >= slope(ch.back(), p))
            ch.pop_back();
        ch.push_back(p);
    }
    void push_floor(Pt p) {
        auto& ch = floor_chain;
        while (ch.size() >= 2 && slope(ch[ch.size() - 2], ch.back()) <= slope(ch.back(), p))
            ch.pop_back();
        ch.push_back(p);
    }

    // Drop chain entries the apex has passed and fronts that are not binding
    // as seen from the apex.
    void reroot_fronts() {
        while (!ceil_chain.empty() && ceil_chain.front().i <= apex.i) ceil_chain.pop_front();
        while (!floor_chain.empty() && floor_chain.front().i <= apex.i) floor_chain.pop_front();
        while (ceil_chain.size() >= 2 &&
               slope(apex, ceil_chain[0]) >= slope(ceil_chain[0], ceil_chain[1]))
            ceil_chain.pop_front();
        while (floor_chain.size() >= 2 &&
               slope(apex, floor_chain[0]) <= slope(floor_chain[0], floor_chain[1]))
            floor_chain.pop_front();
    }

    void advance_apex(Pt p) {
        apex = p;
        committed.push_back(p);
    }

    // While no straight segment from the apex satisfies both first binding
    // constraints, the path bends at whichever obstacle comes first.
    void fixup() {
        for (;;) {
            reroot_fronts();
            if (ceil_chain.empty() || floor_chain.empty()) return;
            double cu = slope(apex, ceil_chain.front());
            double cl = slope(apex, floor_chain.front());
            if (cu >= cl) return;
            if (ceil_chain.front().i < floor_chain.front().i) {
                advance_apex(ceil_chain.front());
                ceil_chain.pop_front();
            } else {
                advance_apex(floor_chain.front());
                floor_chain.pop_front();
            }
        }
    }

    // First forced bend: ride flat at the binding level (lowest ceiling for a
    // climb, highest floor for a descent), bend at its last extremal index.
    void commit_flat(double level, std::size_t bend_index) {
        committed.push_back(Pt{0, level});
        if (bend_index > 0) committed.push_back(Pt{bend_index, level});
        apex = Pt{bend_index, level};
        have_apex = true;
        fixup();
    }

    // Free right end: the string leaves the last apex horizontally once
    // neither chain forces a climb or a descent.
    void relax_tail() {
        for (;;) {
            reroot_fronts();
            double cl = floor_chain.empty() ? -std::numeric_limits<double>::infinity()
                                            : slope(apex, floor_chain.front());
            double cu = ceil_chain.empty() ? std::numeric_limits<double>::infinity()
                                           : slope(apex, ceil_chain.front());
            if (cl > 0.0) {
                advance_apex(floor_chain.front());
                floor_chain.pop_front();
            } else if (cu < 0.0) {
                advance_apex(ceil_chain.front());
                ceil_chain.pop_front();
            } else {
                return;
            }
        }
    }
};

std::vector<std::size_t> slope_change_knots(const std::vector<Pt>& poly) {
    std::vector<std::size_t> knots;
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        double s0 = slope(poly[k - 1], poly[k]);
        double s1 = slope(poly[k], poly[k + 1]);
        double tol = 1e-9 * std::max({1.0, std::abs(s0), std::abs(s1)});
        if (std::abs(s0 - s1) > tol) knots.push_back(poly[k].i);
    }
    return knots;
}

}  // namespace

TautStringResult taut_string(const std::vector<double>& x, double epsilon) {
    if (epsilon < 0.0) throw std::invalid_argument("taut_string: negative epsilon");
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("taut_string: need at least two samples");

    if (epsilon == 0.0) {
        // Zero-width tube: the estimate is the signal itself.
        TautStringResult res{x, 0.0, {}};
        std::vector<Pt> poly(n);
        for (std::size_t i = 0; i < n; ++i) poly[i] = Pt{i, x[i]};
        res.knots = slope_change_knots(poly);
        return res;
    }

    Funnel f;
    f.flo = x[0] - epsilon;
    f.fhi = x[0] + epsilon;
    f.push_ceil(Pt{0, x[0] + epsilon});
    f.push_floor(Pt{0, x[0] - epsilon});

    for (std::size_t i = 1; i < n; ++i) {
        const double u = x[i] + epsilon;
        const double l = x[i] - epsilon;
        f.push_ceil(Pt{i, u});
        f.push_floor(Pt{i, l});
        if (!f.have_apex) {
            if (l > f.fhi) {
                f.commit_flat(f.fhi, f.arg_fhi);
            } else if (u < f.flo) {
                f.commit_flat(f.flo, f.arg_flo);
            } else {
                if (u <= f.fhi) {
                    f.fhi = u;
                    f.arg_fhi = i;
                }
                if (l >= f.flo) {
                    f.flo = l;
                    f.arg_flo = i;
                }
            }
        } else {
            f.fixup();
        }
    }

    TautStringResult res;
    res.epsilon = epsilon;
    res.approx.resize(n);

    if (!f.have_apex) {
        // The tube admits a constant line; take the corridor midpoint.
        double level = 0.5 * (f.flo + f.fhi);
        std::fill(res.approx.begin(), res.approx.end(), level);
        return res;
    }

    f.relax_tail();
    if (f.apex.i < n - 1) f.committed.push_back(Pt{n - 1, f.apex.v});

    const std::vector<Pt>& poly = f.committed;
    for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
        const Pt& a = poly[k];
        const Pt& b = poly[k + 1];
        double s = slope(a, b);
        for (std::size_t i = a.i; i < b.i; ++i)
            res.approx[i] = a.v + s * static_cast<double>(i - a.i);
    }
    res.approx[poly.back().i] = poly.back().v;
    res.knots = slope_change_knots(poly);
    return res;
}

std::array<double, 6> extract_features(const std::vector<double>& x, const TautStringResult& ts) {
    const std::vector<double>& y = ts.approx;
    if (y.size() != x.size()) throw std::invalid_argument("extract_features: length mismatch");
    const std::size_t n = x.size();

    std::vector<std::size_t> bounds;
    bounds.push_back(0);
    bounds.insert(bounds.end(), ts.knots.begin(), ts.knots.end());
    bounds.push_back(n - 1);

    std::vector<double> slopes;
    for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
        std::size_t a = bounds[k], b = bounds[k + 1];
        if (b <= a) continue;
        slopes.push_back((y[b] - y[a]) / static_cast<double>(b - a));
    }
    if (slopes.empty()) slopes.push_back(0.0);

    double mean_abs = 0.0, mean = 0.0, max_abs = 0.0;
    for (double s : slopes) {
        mean_abs += std::abs(s);
        mean += s;
        max_abs = std::max(max_abs, std::abs(s));
    }
    mean_abs /= static_cast<double>(slopes.size());
    mean /= static_cast<double>(slopes.size());
    double var = 0.0;
    for (double s : slopes) var += (s - mean) * (s - mean);
    var /= static_cast<double>(slopes.size());

    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) rss += (x[i] - y[i]) * (x[i] - y[i]);
    double rms = std::sqrt(rss / static_cast<double>(n));

    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) tv += std::abs(y[i + 1] - y[i]);

    return {static_cast<double>(ts.knots.size() + 1), mean_abs, var, rms, tv, max_abs};
}

namespace {

DenseTensor features_tensor(const EcgRecord& rec, const std::array<double, 5>& epsilons,
                            std::size_t start, std::size_t length, std::size_t windows) {
    rec.validate();
    if (rec.length() < start + length * windows)
        throw std::invalid_argument("ECG record too short for the requested sample(s)");

    std::vector<std::size_t> shape{5, 6, 12};
    if (windows > 1) shape.push_back(windows);
    DenseTensor T = DenseTensor::zeros(shape);

    for (std::size_t w = 0; w < windows; ++w) {
        for (std::size_t lead = 0; lead < 12; ++lead) {
            std::vector<double> x(rec.leads[lead].begin() + start + w * length,
                                  rec.leads[lead].begin() + start + (w + 1) * length);
            for (std::size_t e = 0; e < 5; ++e) {
                TautStringResult ts = taut_string(x, epsilons[e]);
                std::array<double, 6> feats = extract_features(x, ts);
                for (std::size_t ftr = 0; ftr < 6; ++ftr)
                    T[e + 5 * ftr + 30 * lead + 360 * w] = feats[ftr];
            }
        }
    }
    return T;
}

}  // namespace

DenseTensor form_tensor_full(const EcgRecord& rec, const std::array<double, 5>& epsilons) {
    std::size_t need = static_cast<std::size_t>(std::llround(90.0 * rec.sample_rate));
    return features_tensor(rec, epsilons, 0, need, 1);
}

DenseTensor form_tensor_windowed(const EcgRecord& rec, const std::array<double, 5>& epsilons) {
    std::size_t wlen = static_cast<std::size_t>(std::llround(30.0 * rec.sample_rate));
    return features_tensor(rec, epsilons, 0, wlen, 3);
}

EcgRecord add_signal_noise(const EcgRecord& rec, double snr_db, Rng& rng) {
    rec.validate();
    EcgRecord out = rec;
    double factor = std::pow(10.0, snr_db / 20.0);
    for (std::size_t lead = 0; lead < out.leads.size(); ++lead) {
        double sig = 0.0;
        for (double v : out.leads[lead]) sig += v * v;
        sig = std::sqrt(sig);
        if (sig == 0.0)
            throw std::invalid_argument("add_signal_noise: silent lead " + std::to_string(lead));
        std::vector<double> g(out.leads[lead].size());
        double gn = 0.0;
        for (double& v : g) {
            v = rng.normal();
            gn += v * v;
        }
        gn = std::sqrt(gn);
        double scale = sig / (gn * factor);
        for (std::size_t i = 0; i < g.size(); ++i) out.leads[lead][i] += scale * g[i];
    }
    return out;
}

EcgRecord read_ecg_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_ecg_file: cannot open '" + path + "'");
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error("read_ecg_file: missing header in '" + path + "'");

    EcgRecord rec;
    std::size_t length = 0;
    std::size_t n_leads = 0;
    std::stringstream ss(header);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        std::string key = tok.substr(0, eq);
        std::string val = tok.substr(eq + 1);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t") + 1);
        val.erase(0, val.find_first_not_of(" \t"));
        val.erase(val.find_last_not_of(" \t") + 1);
        if (key == "sample_rate") rec.sample_rate = std::stod(val);
        else if (key == "leads") n_leads = std::stoull(val);
        else if (key == "length") length = std::stoull(val);
        else if (key == "id") rec.id = val;
        else if (key == "label") {
            if (val == "healthy") rec.label = EcgRecord::Label::healthy;
            else if (val == "unhealthy") rec.label = EcgRecord::Label::unhealthy;
            else rec.label = EcgRecord::Label::unknown;
        }
    }
    if (n_leads != 12)
        throw std::runtime_error("read_ecg_file: header must declare leads=12 in '" + path + "'");
    if (length == 0) throw std::runtime_error("read_ecg_file: header must declare length in '" + path + "'");

    rec.leads.assign(12, std::vector<double>(length));
    for (std::size_t i = 0; i < length; ++i) {
        for (std::size_t lead = 0; lead < 12; ++lead) {
            if (!(in >> rec.leads[lead][i]))
                throw std::runtime_error("read_ecg_file: truncated sample data in '" + path + "'");
        }
    }
    rec.validate();
    return rec;
}

void write_ecg_file(const std::string& path, const EcgRecord& rec) {
    rec.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_ecg_file: cannot open '" + path + "'");
    out << "sample_rate=" << rec.sample_rate << ", leads=12, length=" << rec.length();
    if (!rec.id.empty()) out << ", id=" << rec.id;
    if (rec.label == EcgRecord::Label::healthy) out << ", label=healthy";
    else if (rec.label == EcgRecord::Label::unhealthy) out << ", label=unhealthy";
    out << '\n';
    char buf[40];
    for (std::size_t i = 0; i < rec.length(); ++i) {
        for (std::size_t lead = 0; lead < 12; ++lead) {
            std::snprintf(buf, sizeof buf, "%.17g", rec.leads[lead][i]);
            out << buf << (lead + 1 < 12 ? " " : "\n");
        }
    }
    if (!out) throw std::runtime_error("write_ecg_file: write failed for '" + path + "'");
}

EcgRecord make_synthetic_ecg(std::uint64_t seed, double seconds, double sample_rate) {
    EcgRecord rec;
    rec.sample_rate = sample_rate;
    rec.id = "synthetic-" + std::to_string(seed);
    std::size_t n = static_cast<std::size_t>(std::llround(seconds * sample_rate));
    Rng rng(derive_seed(seed, 0x656367ULL));
    rec.leads.assign(12, std::vector<double>(n, 0.0));
    // triangular bump rising over [start, peak] and falling over [peak, end]
    auto bump = [](double within, double start, double peak, double end) {
        if (within <= start || within >= end) return 0.0;
        return within < peak ? (within - start) / (peak - start) : (end - within) / (end - peak);
    };
    for (std::size_t lead = 0; lead < 12; ++lead) {
        // piecewise-linear beat train (QRS + T wave) with lead-specific
        // amplitude and phase, over a triangle-wave baseline wander
        double amp = 0.7 + 0.1 * static_cast<double>(lead % 4) + 0.05 * rng.uniform();
        double phase = rng.uniform() * sample_rate;
        double beat = sample_rate * (0.8 + 0.02 * rng.uniform());
        for (std::size_t i = 0; i < n; ++i) {
            double t = static_cast<double>(i);
            double cycle = std::fmod(t, 10.0 * sample_rate) / (10.0 * sample_rate);
            double wander = 0.05 * (cycle < 0.5 ? 4.0 * cycle - 1.0 : 3.0 - 4.0 * cycle);
            double within = std::fmod(t + phase, beat) / sample_rate;  // seconds into beat
            double v = wander;
            v += amp * bump(within, 0.10, 0.15, 0.25);
            v += 0.25 * amp * bump(within, 0.35, 0.45, 0.55);
            rec.leads[lead][i] = v;
        }
    }
    return rec;
}

}  // namespace tdn
