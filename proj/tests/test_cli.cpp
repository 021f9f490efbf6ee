#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "manifest.hpp"
#include "optpred/csv.hpp"

namespace fs = std::filesystem;
using optpred::cli::run;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("optpred_cli_" + std::string(info->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int cli(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return run(args, out_, err_);
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write_curve(const std::string& name, const std::vector<double>& t, const std::vector<double>& z) {
        std::ofstream os(path(name));
        os << "t,a_enstrophy_of_mean,stderr,mean_a_enstrophy,mean_a_enstrophy_stderr\n";
        for (std::size_t j = 0; j < t.size(); ++j) os << t[j] << ',' << z[j] << ",0.001," << z[j] << ",0.001\n";
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, UnknownCommandAndHelp) {
    EXPECT_EQ(cli({"no-such-command"}), 1);
    EXPECT_EQ(cli({}), 1);
    EXPECT_EQ(cli({"--help"}), 0);
    EXPECT_EQ(cli({"hald", "--help"}), 0);
    EXPECT_NE(out_.str().find("--ensemble"), std::string::npos);
}

TEST_F(CliTest, HaldWritesItsTables) {
    const auto out = path("hald");
    ASSERT_EQ(cli({"hald", "--ensemble", "20", "--t-end", "2", "--out", out}), 0) << err_.str();
    for (const char* f : {"hald_mean.csv", "hald_op.csv", "hald_galerkin.csv", "manifest.json"})
        EXPECT_TRUE(fs::exists(fs::path(out) / f)) << f;
    const auto mean = optpred::csv::read_table_file(out + "/hald_mean.csv");
    EXPECT_EQ(mean.rows.size(), 5u);
    EXPECT_DOUBLE_EQ(mean.reals("amplitude").front(), std::sqrt(2.0));
    const auto op = optpred::csv::read_table_file(out + "/hald_op.csv");
    const auto h = op.reals("H_renorm");
    for (double v : h) EXPECT_NEAR(v, h.front(), 1e-6);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(cli({"hald", "--ensemble", "0", "--out", path("a")}), 1);
    EXPECT_EQ(cli({"hald", "--ensemble", "many", "--out", path("a")}), 1);
    EXPECT_EQ(cli({"hald", "--set", "bogus=1", "--out", path("a")}), 1);
    EXPECT_EQ(cli({"hald", "--set", "noequals", "--out", path("a")}), 1);
    EXPECT_EQ(cli({"hald", "--t-end", "1", "--dt-out", "0.3", "--out", path("a")}), 1);
    EXPECT_EQ(cli({"euler-mc", "--m", "3", "--sampled-bound", "4", "--out", path("a")}), 1);
    EXPECT_EQ(cli({"euler-sop", "--out", path("a")}), 1);
    EXPECT_EQ(cli({"euler-sop", "--c", "2", "--gamma-form", "weird", "--out", path("a")}), 1);
    EXPECT_EQ(cli({"langevin", "--gamma", "0", "--out", path("a")}), 1);
    EXPECT_EQ(cli({"euler-mc", "--initial", path("missing.csv"), "--out", path("a")}), 1);
}

TEST_F(CliTest, ConfigFileAndOverrides) {
    {
        std::ofstream os(path("run.cfg"));
        os << "# small run\nensemble = 5\nt_end = 1\n\nseed=3\n";
    }
    const auto out = path("cfg");
    ASSERT_EQ(cli({"hald", "--config", path("run.cfg"), "--set", "t_end=1.5", "--out", out}), 0) << err_.str();
    const auto m = optpred::cli::RunManifest::read(out + "/manifest.json");
    EXPECT_EQ(m.command, "hald");
    EXPECT_EQ(m.master_seed, 3u);
    auto value = [&](const std::string& k) {
        for (const auto& [key, v] : m.config)
            if (key == k) return v;
        return std::string();
    };
    EXPECT_EQ(value("ensemble"), "5");
    EXPECT_EQ(value("t_end"), "1.5");
    EXPECT_EQ(value("q1"), "1");

    {
        std::ofstream os(path("bad.cfg"));
        os << "unknown_key = 2\n";
    }
    EXPECT_EQ(cli({"hald", "--config", path("bad.cfg"), "--out", out}), 1);
    EXPECT_EQ(cli({"hald", "--config", path("nope.cfg"), "--out", out}), 1);
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
    const auto out = path("env");
    ::setenv("OPTPRED_OUTPUT_DIR", out.c_str(), 1);
    EXPECT_EQ(optpred::cli::default_output_dir(), out);
    const int code = cli({"langevin", "--ensemble", "10", "--t-end", "10", "--stride", "1000"});
    ::unsetenv("OPTPRED_OUTPUT_DIR");
    ASSERT_EQ(code, 0) << err_.str();
    EXPECT_TRUE(fs::exists(fs::path(out) / "langevin_summary.csv"));
    EXPECT_EQ(optpred::cli::default_output_dir(), "optpred_out");
}

TEST_F(CliTest, LangevinWithoutNoiseHasZeroVariance) {
    const auto out = path("lz");
    ASSERT_EQ(cli({"langevin", "--noise-q", "0", "--ensemble", "10", "--t-end", "10", "--out", out}), 0) << err_.str();
    const auto tab = optpred::csv::read_table_file(out + "/langevin_variance.csv");
    for (double v : tab.reals("variance")) EXPECT_EQ(v, 0.0);
}

TEST_F(CliTest, CompareIdenticalAndScaled) {
    const std::vector<double> t{0.0, 0.5, 1.0, 1.5};
    const std::vector<double> z{2.0, 1.8, 1.5, 1.2};
    std::vector<double> y;
    for (double v : z) y.push_back(1.5 * v);
    write_curve("full.csv", t, z);
    write_curve("same.csv", t, z);
    write_curve("scaled.csv", t, y);
    EXPECT_EQ(cli({"compare", path("full.csv"), path("same.csv"), "--out", path("c1")}), 0) << err_.str();
    EXPECT_NE(out_.str().find("max_relative_deviation 0 "), std::string::npos) << out_.str();
    EXPECT_NE(out_.str().find("result PASS"), std::string::npos);
    EXPECT_EQ(cli({"compare", "--full", path("full.csv"), "--reduced", path("scaled.csv"), "--out", path("c2")}), 3);
    EXPECT_NE(out_.str().find("max_relative_deviation 0.5 "), std::string::npos) << out_.str();
    EXPECT_TRUE(fs::exists(path("c2/compare_report.txt")));

    write_curve("short.csv", {0.0, 0.5, 1.0}, {2.0, 1.8, 1.5});
    write_curve("shifted.csv", {0.0, 0.5, 1.0, 1.6}, z);
    EXPECT_EQ(cli({"compare", path("full.csv"), path("short.csv"), "--out", path("c3")}), 1);
    EXPECT_EQ(cli({"compare", path("full.csv"), path("shifted.csv"), "--out", path("c3")}), 1);
    EXPECT_EQ(cli({"compare", path("full.csv"), "--out", path("c3")}), 1);
}

TEST_F(CliTest, CorrelationFitFromSyntheticTable) {
    {
        std::ofstream os(path("corr.csv"));
        os << "k1,k2,tau,re_C,im_C,stderr\n";
        for (auto [k1, k2] : {std::pair{3, 0}, std::pair{3, 1}, std::pair{0, 4}, std::pair{4, -3}})
            for (int j = 0; j <= 40; ++j) {
                const double tau = 0.05 * j, s = 2.0 / std::hypot(k1, k2);
                os << k1 << ',' << k2 << ',' << tau << ',' << 0.1 * std::exp(-tau * tau / (s * s)) << ",0,0.001\n";
            }
    }
    const auto out = path("fit");
    ASSERT_EQ(cli({"euler-correlations", "--input", path("corr.csv"), "--out", out}), 0) << err_.str();
    const auto model = optpred::csv::read_table_file(out + "/width_model.csv");
    EXPECT_NEAR(model.reals("c").front(), 2.0, 1e-3);
    EXPECT_NEAR(model.reals("residual").front(), 0.0, 1e-3);
    const auto widths = optpred::csv::read_table_file(out + "/widths.csv");
    EXPECT_EQ(widths.rows.size(), 4u);

    {
        std::ofstream os(path("empty.csv"));
        os << "k1,k2,tau,re_C,im_C,stderr\n";
    }
    EXPECT_EQ(cli({"euler-correlations", "--input", path("empty.csv"), "--out", out}), 1);
}

TEST_F(CliTest, ReducedModelWithZeroWidthIsConstant) {
    const auto out = path("sop");
    ASSERT_EQ(cli({"euler-sop", "--c", "0", "--m", "1", "--sampled-bound", "2", "--ensemble", "2", "--t-end", "0.5",
                   "--dt-out", "0.1", "--out", out}),
              0)
        << err_.str();
    const auto tab = optpred::csv::read_table_file(out + "/aenstrophy_reduced.csv");
    const auto z = tab.reals("a_enstrophy_of_mean");
    ASSERT_EQ(z.size(), 6u);
    for (double v : z) EXPECT_NEAR(v / z.front(), 1.0, 1e-6);
}

TEST_F(CliTest, RerunReproducesChecksums) {
    const auto a = path("first");
    ASSERT_EQ(cli({"euler-mc", "--m", "1", "--sampled-bound", "2", "--ensemble", "6", "--t-end", "0.4", "--dt-out",
                   "0.1", "--history-dt", "0.1", "--workers", "1", "--out", a}),
              0)
        << err_.str();
    const auto m = optpred::cli::RunManifest::read(a + "/manifest.json");
    EXPECT_FALSE(m.outputs.empty());
    for (const auto& o : m.outputs) EXPECT_EQ(o.fnv1a, optpred::cli::fnv1a_file(a + "/" + o.file)) << o.file;
    EXPECT_EQ(cli({"rerun", a + "/manifest.json", "--out", path("second"), "--workers", "3"}), 0) << out_.str();
    EXPECT_NE(out_.str().find("reproduced"), std::string::npos);

    // Tampered checksum: the rerun must report a mismatch.
    auto bad = m;
    bad.outputs.front().fnv1a = "0000000000000000";
    bad.write(path("bad_manifest.json"));
    EXPECT_EQ(cli({"rerun", path("bad_manifest.json"), "--out", path("third")}), 3);
    EXPECT_EQ(cli({"rerun", path("none.json"), "--out", path("third")}), 1);
}

TEST(Manifest, Fnv1a) {
    EXPECT_EQ(optpred::cli::fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(optpred::cli::fnv1a_hex("a"), "af63dc4c8601ec8c");
    EXPECT_EQ(optpred::cli::fnv1a_hex("foobar"), "85944171f73967e8");
}
