#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tdn/datagen.hpp"
#include "tdn/ecg.hpp"
#include "tdn/tensor_ops.hpp"

using namespace tdn;

namespace {

EcgRecord periodic_record(double seconds, double rate) {
    EcgRecord rec;
    rec.sample_rate = rate;
    rec.id = "periodic";
    std::size_t n = static_cast<std::size_t>(seconds * rate);
    rec.leads.assign(12, std::vector<double>(n));
    for (std::size_t lead = 0; lead < 12; ++lead)
        for (std::size_t i = 0; i < n; ++i) {
            double t = static_cast<double>(i) / rate;  // period 1 s, divides 30 s
            rec.leads[lead][i] =
                std::sin(2.0 * 3.14159265358979323846 * t) * (1.0 + 0.1 * static_cast<double>(lead));
        }
    return rec;
}

}  // namespace

TEST_CASE("record validation") {
    EcgRecord rec = make_synthetic_ecg(1, 2.0, 100.0);
    rec.validate();
    EcgRecord bad = rec;
    bad.leads.pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = rec;
    bad.leads[3].pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("tensor shapes are 5x6x12 and 5x6x12x3 and formation is deterministic") {
    EcgRecord rec = make_synthetic_ecg(7, 90.0, 100.0);
    DenseTensor full = form_tensor_full(rec);
    CHECK(full.shape() == std::vector<std::size_t>{5, 6, 12});
    DenseTensor win = form_tensor_windowed(rec);
    CHECK(win.shape() == std::vector<std::size_t>{5, 6, 12, 3});

    DenseTensor again = form_tensor_full(rec);
    for (std::size_t i = 0; i < full.size(); ++i) CHECK(full[i] == again[i]);

    EcgRecord shorty = make_synthetic_ecg(7, 10.0, 100.0);
    CHECK_THROWS_AS(form_tensor_full(shorty), std::invalid_argument);
    CHECK_THROWS_AS(form_tensor_windowed(shorty), std::invalid_argument);
}

TEST_CASE("all-zero leads produce zeros except the segment-count slab") {
    EcgRecord rec;
    rec.sample_rate = 50.0;
    rec.leads.assign(12, std::vector<double>(static_cast<std::size_t>(90 * 50), 0.0));
    DenseTensor T = form_tensor_full(rec);
    for (std::size_t e = 0; e < 5; ++e)
        for (std::size_t f = 0; f < 6; ++f)
            for (std::size_t l = 0; l < 12; ++l) {
                double v = T.at({e, f, l});
                if (f == 0)
                    CHECK(v == 1.0);
                else
                    CHECK(v == 0.0);
            }
}

TEST_CASE("windowed slab 0 equals features of the first 30 seconds") {
    EcgRecord rec = make_synthetic_ecg(21, 90.0, 80.0);
    DenseTensor win = form_tensor_windowed(rec);
    std::size_t wlen = static_cast<std::size_t>(30 * 80);
    for (std::size_t lead = 0; lead < 12; ++lead) {
        std::vector<double> x(rec.leads[lead].begin(), rec.leads[lead].begin() + wlen);
        for (std::size_t e = 0; e < 5; ++e) {
            TautStringResult ts = taut_string(x, kEcgEpsilons[e]);
            auto feats = extract_features(x, ts);
            for (std::size_t f = 0; f < 6; ++f)
                CHECK(win.at({e, f, lead, 0}) == doctest::Approx(feats[f]).epsilon(1e-14));
        }
    }
}

TEST_CASE("a stationary periodic signal yields identical window slabs") {
    EcgRecord rec = periodic_record(90.0, 60.0);
    DenseTensor win = form_tensor_windowed(rec);
    for (std::size_t e = 0; e < 5; ++e)
        for (std::size_t f = 0; f < 6; ++f)
            for (std::size_t l = 0; l < 12; ++l) {
                double w0 = win.at({e, f, l, 0});
                CHECK(win.at({e, f, l, 1}) == doctest::Approx(w0).epsilon(1e-9));
                CHECK(win.at({e, f, l, 2}) == doctest::Approx(w0).epsilon(1e-9));
            }
}

TEST_CASE("add_signal_noise calibrates each lead and keeps the clean content") {
    EcgRecord rec = make_synthetic_ecg(3, 5.0, 200.0);
    Rng rng(11);
    EcgRecord noisy = add_signal_noise(rec, 20.0, rng);
    for (std::size_t lead = 0; lead < 12; ++lead) {
        double sig = 0.0, err = 0.0;
        for (std::size_t i = 0; i < rec.leads[lead].size(); ++i) {
            sig += rec.leads[lead][i] * rec.leads[lead][i];
            double d = noisy.leads[lead][i] - rec.leads[lead][i];
            err += d * d;
        }
        double snr = 20.0 * std::log10(std::sqrt(sig) / std::sqrt(err));
        CHECK(std::abs(snr - 20.0) <= 1e-9);
    }

    Rng rng2(12);
    EcgRecord noisy2 = add_signal_noise(rec, 20.0, rng2);
    bool differs = false;
    for (std::size_t i = 0; i < noisy.leads[0].size() && !differs; ++i)
        differs = noisy.leads[0][i] != noisy2.leads[0][i];
    CHECK(differs);

    EcgRecord silent = rec;
    for (double& v : silent.leads[4]) v = 0.0;
    Rng rng3(13);
    CHECK_THROWS_AS(add_signal_noise(silent, 20.0, rng3), std::invalid_argument);
}

TEST_CASE("noisier signals give lower tensor-level SNR on average") {
    const double ladder[] = {20.0, 5.0, -5.0, -20.0};
    std::vector<double> mean_snr(4, 0.0);
    const int n_records = 10;
    for (int r = 0; r < n_records; ++r) {
        EcgRecord rec = make_synthetic_ecg(100 + static_cast<std::uint64_t>(r), 90.0, 50.0);
        DenseTensor clean = form_tensor_full(rec);
        for (int k = 0; k < 4; ++k) {
            Rng rng(derive_seed(500, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(k)));
            EcgRecord noisy = add_signal_noise(rec, ladder[k], rng);
            DenseTensor noisyT = form_tensor_full(noisy);
            mean_snr[static_cast<std::size_t>(k)] +=
                measure_snr_db(clean, noisyT) / static_cast<double>(n_records);
        }
    }
    CHECK(mean_snr[0] > mean_snr[1]);
    CHECK(mean_snr[1] > mean_snr[2]);
    CHECK(mean_snr[2] > mean_snr[3]);
}

TEST_CASE("ECG text container round-trips") {
    EcgRecord rec = make_synthetic_ecg(5, 2.0, 100.0);
    rec.label = EcgRecord::Label::healthy;
    write_ecg_file("ecg_roundtrip.txt", rec);
    EcgRecord back = read_ecg_file("ecg_roundtrip.txt");
    CHECK(back.sample_rate == rec.sample_rate);
    CHECK(back.id == rec.id);
    CHECK(back.label == EcgRecord::Label::healthy);
    REQUIRE(back.length() == rec.length());
    for (std::size_t lead = 0; lead < 12; ++lead)
        for (std::size_t i = 0; i < rec.length(); ++i)
            CHECK(back.leads[lead][i] == rec.leads[lead][i]);
    CHECK_THROWS(read_ecg_file("missing_ecg.txt"));
}
