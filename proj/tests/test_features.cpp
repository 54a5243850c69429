#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vigil/errors.hpp"
#include "vigil/features.hpp"
#include "vigil/spectral.hpp"

using namespace vigil;
using namespace vigil::features;
using spectral::BandName;
using spectral::BandPowerTable;
using spectral::ChannelBandPower;

namespace {

ChannelBandPower powers(double alpha, double beta) {
    ChannelBandPower p;
    p.band[static_cast<std::size_t>(BandName::Alpha)] = alpha;
    p.band[static_cast<std::size_t>(BandName::Beta)] = beta;
    p.total = alpha + beta;
    return p;
}

// Table with one (alpha, beta) pair per role, in role order
// AF3, AF4, F3, F4, FC6, F8, P8.
BandPowerTable table_of(const std::vector<std::pair<double, double>>& entries) {
    REQUIRE(entries.size() == kNumRoles);
    BandPowerTable t;
    std::size_t i = 0;
    for (ChannelRole role : all_roles()) {
        t.put(std::string(role_name(role)), powers(entries[i].first, entries[i].second));
        ++i;
    }
    return t;
}

spectral::Epoch single_channel_epoch(const std::vector<double>& samples, double rate,
                                     const std::string& label) {
    spectral::Epoch epoch;
    epoch.sample_rate_hz = rate;
    epoch.duration_s = static_cast<double>(samples.size()) / rate;
    epoch.add_channel(label, samples);
    return epoch;
}

ChannelMap uniform_map(const std::string& label) {
    ChannelMap map = ChannelMap::default_sleep_edf();
    for (ChannelRole role : all_roles()) map.set_label(role, label);
    return map;
}

}  // namespace

TEST_CASE("arousal is the frontal alpha sum over the frontal beta sum") {
    // equal alpha and beta everywhere -> 1
    auto t1 = table_of({{1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}});
    CHECK(arousal(t1) == 1.0);
    // alpha twice beta on every frontal channel -> 2
    auto t2 = table_of({{2, 1}, {4, 2}, {6, 3}, {8, 4}, {1, 1}, {1, 1}, {1, 1}});
    CHECK(arousal(t2) == 2.0);
    // sums (1+2+3+4) / (4+3+2+1) -> 1; rear channels must not matter
    auto t3 = table_of({{1, 4}, {2, 3}, {3, 2}, {4, 1}, {9, 9}, {9, 9}, {9, 9}});
    CHECK(arousal(t3) == 1.0);
}

TEST_CASE("valence is the hemispheric alpha/beta ratio difference") {
    // identical F3 and F4 entries -> exactly zero
    auto t1 = table_of({{5, 2}, {5, 2}, {3, 7}, {3, 7}, {1, 1}, {1, 1}, {1, 1}});
    CHECK(valence(t1) == 0.0);
    // F4 ratio 3, F3 ratio 1 -> 2
    auto t2 = table_of({{1, 1}, {1, 1}, {2, 2}, {6, 2}, {1, 1}, {1, 1}, {1, 1}});
    CHECK(valence(t2) == 2.0);
    // F4 ratio 2/4, F3 ratio 3/2 -> -1
    auto t3 = table_of({{1, 1}, {1, 1}, {3, 2}, {2, 4}, {1, 1}, {1, 1}, {1, 1}});
    CHECK(valence(t3) == -1.0);
}

TEST_CASE("dominance sums the rear beta/alpha ratios") {
    auto t1 = table_of({{1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}});
    CHECK(dominance(t1) == 3.0);
    // ratios 0.5, 1, 1.5
    auto t2 = table_of({{1, 1}, {1, 1}, {1, 1}, {1, 1}, {2, 1}, {2, 2}, {2, 3}});
    CHECK(dominance(t2) == 3.0);
    // beta (2,6,4) over alpha (1,2,8): 2 + 3 + 0.5
    auto t3 = table_of({{1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 2}, {2, 6}, {8, 4}});
    CHECK(dominance(t3) == 5.5);
}

TEST_CASE("features are invariant under a common positive gain") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> val(0.1, 10.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::pair<double, double>> entries;
        for (std::size_t i = 0; i < kNumRoles; ++i) entries.emplace_back(val(rng), val(rng));
        auto base = table_of(entries);
        const double gain = val(rng);
        auto scaled_entries = entries;
        for (auto& [a, b] : scaled_entries) {
            a *= gain;
            b *= gain;
        }
        auto scaled = table_of(scaled_entries);
        CHECK(arousal(scaled) == doctest::Approx(arousal(base)).epsilon(1e-12));
        CHECK(valence(scaled) == doctest::Approx(valence(base)).epsilon(1e-12));
        CHECK(dominance(scaled) == doctest::Approx(dominance(base)).epsilon(1e-12));
    }
}

TEST_CASE("undefined features raise instead of dividing by nothing") {
    SUBCASE("zero frontal beta breaks arousal") {
        auto t = table_of({{1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 1}, {1, 1}, {1, 1}});
        CHECK_THROWS_AS(arousal(t), FeatureUndefinedError);
        try {
            arousal(t);
        } catch (const FeatureUndefinedError& e) {
            CHECK(std::string(e.what()).find("beta") != std::string::npos);
        }
    }
    SUBCASE("zero rear alpha breaks dominance") {
        auto t = table_of({{1, 1}, {1, 1}, {1, 1}, {1, 1}, {0, 1}, {1, 1}, {1, 1}});
        CHECK_THROWS_AS(dominance(t), FeatureUndefinedError);
        try {
            dominance(t);
        } catch (const FeatureUndefinedError& e) {
            CHECK(std::string(e.what()).find("alpha") != std::string::npos);
        }
    }
    SUBCASE("negligible power relative to the channel total also counts") {
        auto t = table_of({{1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}});
        ChannelBandPower tiny = powers(1.0, 1e-20);
        tiny.total = 1e8;  // beta is 1e-28 of the total: numerical dust
        BandPowerTable t2 = t;
        t2.channels[3].second = tiny;  // F4
        CHECK_THROWS_AS(valence(t2), FeatureUndefinedError);
    }
}

TEST_CASE("feature extraction over a synthetic two-tone epoch") {
    // amplitude 2 at 10 Hz (alpha) + amplitude 0.2 at 20 Hz (beta):
    // band powers 2.0 and 0.02.
    auto samples = oracles::tone(2000, 100.0, 10.0, 2.0);
    oracles::add_tone(samples, 100.0, 20.0, 0.2);
    auto epoch = single_channel_epoch(samples, 100.0, "only");
    epoch.start_time_s = 40.0;
    auto map = uniform_map("only");

    FeatureVector fv = extract_features(epoch, map);
    CHECK(fv.arousal == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(fv.valence == 0.0);  // one physical channel: ratios cancel exactly
    CHECK(fv.dominance == doctest::Approx(0.03).epsilon(1e-9));
    CHECK(fv.epoch_start_s == 40.0);

    SUBCASE("arousal and dominance are reciprocal for one channel") {
        CHECK(fv.arousal * (fv.dominance / 3.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("a pure alpha tone leaves every ratio with an empty denominator") {
        auto pure = single_channel_epoch(oracles::tone(2000, 100.0, 10.0, 1.0), 100.0, "only");
        CHECK_THROWS_AS(extract_features(pure, map), FeatureUndefinedError);
    }
    SUBCASE("the table overload matches the per-feature calls") {
        auto table = role_band_powers(epoch, map);
        FeatureVector fv2 = extract_features(table);
        CHECK(fv2.arousal == arousal(table));
        CHECK(fv2.valence == valence(table));
        CHECK(fv2.dominance == dominance(table));
        CHECK(fv2.arousal == fv.arousal);
        CHECK(fv2.epoch_start_s == 0.0);  // the table carries no timestamp
    }
}

TEST_CASE("role band powers share one transform per physical channel") {
    auto front = oracles::tone(2000, 100.0, 10.0, 1.0);
    oracles::add_tone(front, 100.0, 20.0, 0.5);
    auto rear = oracles::tone(2000, 100.0, 15.0, 1.0);
    oracles::add_tone(rear, 100.0, 9.0, 0.25);

    spectral::Epoch epoch;
    epoch.sample_rate_hz = 100.0;
    epoch.duration_s = 20.0;
    epoch.add_channel("front", front);
    epoch.add_channel("rear", rear);

    ChannelMap map = uniform_map("front");
    map.set_label(ChannelRole::P8, "rear");

    auto table = role_band_powers(epoch, map);
    auto front_direct = spectral::channel_band_powers(spectral::fft(front, 100.0));
    auto rear_direct = spectral::channel_band_powers(spectral::fft(rear, 100.0));

    for (ChannelRole role : all_roles()) {
        const auto& expected = role == ChannelRole::P8 ? rear_direct : front_direct;
        const auto& got = table.at(role_name(role));
        for (std::size_t b = 0; b < spectral::kNumBands; ++b) {
            CHECK(got.band[b] == expected.band[b]);
        }
        CHECK(got.total == expected.total);
    }
    CHECK(table.contains("P8"));
    CHECK(!table.contains("XX"));
    CHECK_THROWS_AS(table.at("XX"), InputError);
}

TEST_CASE("role names and keys") {
    CHECK(all_roles().size() == kNumRoles);
    CHECK(role_name(ChannelRole::AF3) == "AF3");
    CHECK(role_key(ChannelRole::AF3) == "af3");
    CHECK(role_key(ChannelRole::FC6) == "fc6");
    CHECK(parse_role("F4") == ChannelRole::F4);
    CHECK(parse_role("f4") == ChannelRole::F4);
    CHECK(!parse_role("F9").has_value());
}

TEST_CASE("channel map parsing") {
    SUBCASE("full config with comments and padding") {
        const char* text =
            "# frontal pairs\n"
            "AF3 = chan one\n"
            "  AF4=chan two   # inline comment\n"
            "F3 = chan one\n"
            "F4 = chan two\n"
            "\n"
            "FC6 = chan three\n"
            "F8 = chan three\n"
            "P8 = rear\n";
        ChannelMap map = ChannelMap::parse(text);
        CHECK(map.label(ChannelRole::AF3) == "chan one");
        CHECK(map.label(ChannelRole::AF4) == "chan two");
        CHECK(map.label(ChannelRole::P8) == "rear");
        CHECK(map.distinct_labels() ==
              std::vector<std::string>{"chan one", "chan two", "chan three", "rear"});
    }
    SUBCASE("missing roles are reported") {
        try {
            ChannelMap::parse("AF3 = x\n");
            FAIL("expected InputError");
        } catch (const InputError& e) {
            std::string msg = e.what();
            CHECK(msg.find("missing") != std::string::npos);
            CHECK(msg.find("P8") != std::string::npos);
        }
    }
    SUBCASE("duplicate role is an error with its line number") {
        const char* text = "AF3 = x\nAF3 = y\n";
        try {
            ChannelMap::parse(text);
            FAIL("expected InputError");
        } catch (const InputError& e) {
            std::string msg = e.what();
            CHECK(msg.find("line 2") != std::string::npos);
            CHECK(msg.find("AF3") != std::string::npos);
        }
    }
    SUBCASE("unknown role is an error") {
        CHECK_THROWS_AS(ChannelMap::parse("CZ = x\n"), InputError);
    }
    SUBCASE("missing separator is an error") {
        CHECK_THROWS_AS(ChannelMap::parse("AF3 x\n"), InputError);
    }
    SUBCASE("empty label is an error") {
        CHECK_THROWS_AS(ChannelMap::parse("AF3 = \n"), InputError);
    }
    SUBCASE("load reports unreadable files") {
        CHECK_THROWS_AS(ChannelMap::load("/nonexistent/channel.map"), IoError);
    }
    SUBCASE("load round-trips through a file") {
        auto dir = oracles::test_dir("channel_map");
        auto path = dir / "map.conf";
        {
            std::ofstream out(path);
            out << "AF3=a\nAF4=a\nF3=a\nF4=a\nFC6=a\nF8=a\nP8=b\n";
        }
        ChannelMap map = ChannelMap::load(path);
        CHECK(map.label(ChannelRole::F8) == "a");
        CHECK(map.label(ChannelRole::P8) == "b");
    }
}

TEST_CASE("default two-channel map and recording validation") {
    ChannelMap map = ChannelMap::default_sleep_edf();
    for (ChannelRole role :
         {ChannelRole::AF3, ChannelRole::AF4, ChannelRole::F3, ChannelRole::F4, ChannelRole::FC6,
          ChannelRole::F8}) {
        CHECK(map.label(role) == "EEG Fpz-Cz");
    }
    CHECK(map.label(ChannelRole::P8) == "EEG Pz-Oz");
    CHECK(map.distinct_labels() == std::vector<std::string>{"EEG Fpz-Cz", "EEG Pz-Oz"});

    edf::SyntheticChannel a;
    a.label = "EEG Fpz-Cz";
    a.sample_rate_hz = 2.0;
    a.samples = {0.0, 1.0};
    edf::SyntheticChannel b = a;
    b.label = "EEG Pz-Oz";
    auto rec = edf::make_recording({a, b});
    CHECK_NOTHROW(map.validate_against(rec));

    auto only_one = edf::make_recording({a});
    CHECK_THROWS_AS(map.validate_against(only_one), InputError);
}
