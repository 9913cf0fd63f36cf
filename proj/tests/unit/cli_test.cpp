#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nsdwav_cli/bench_config.hpp"
#include "nsdwav_cli/commands.hpp"
#include "nsdwav_cli/csv.hpp"
#include "nsdwav_cli/key_value.hpp"

namespace nsdwav::cli {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("nsdwav_cli_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run nsdwav(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string without_timestamp(const std::string& manifest) {
  std::istringstream in(manifest);
  std::string line, kept;
  while (std::getline(in, line)) {
    if (line.rfind("timestamp", 0) != 0) kept += line + "\n";
  }
  return kept;
}

TEST(KeyValues, ParseAndSerialize) {
  const auto kv = KeyValues::parse("# comment\n b = 2 \n\na=x y # trailing\n");
  EXPECT_EQ(kv.get("a"), "x y");
  EXPECT_EQ(kv.get_int("b"), 2);
  EXPECT_EQ(kv.line_of("b"), 2u);
  EXPECT_EQ(kv.serialize(), "a = x y\nb = 2\n");
  EXPECT_EQ(KeyValues::parse(kv.serialize()).entries(), kv.entries());
}

TEST(KeyValues, Diagnostics) {
  try {
    KeyValues::parse("a = 1\nnot a pair\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  try {
    KeyValues::parse("a = 1\na = 2\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.field(), "a");
  }
  const auto kv = KeyValues::parse("x = 1.5\ny = abc\nz = maybe\n");
  EXPECT_DOUBLE_EQ(kv.get_double("x"), 1.5);
  try {
    kv.get_double("y");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.field(), "y");
  }
  EXPECT_THROW(kv.get_int("x"), ConfigError);
  EXPECT_THROW(kv.get_bool("z"), ConfigError);
  EXPECT_THROW(kv.require_known({"x", "y"}), ConfigError);
  EXPECT_EQ(KeyValues::parse("l = a, b ,c").get_list("l"), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Csv, FormatIsLocaleFreeAndRoundTrips) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  for (double v : {1.0 / 3.0, -2.5e-300, 12345.678, 0.0}) EXPECT_EQ(parse_double(format_double(v), "v"), v);
}

TEST(Csv, ReadWrite) {
  TempDir dir;
  const std::vector<double> x{0.25, 0.5}, y{1.0 / 3.0, -2.0};
  write_xy_csv(dir.file("a.csv"), "fitted", x, y);
  EXPECT_EQ(slurp(dir.file("a.csv")), "x,fitted\n0.25," + format_double(1.0 / 3.0) + "\n0.5,-2\n");
  const auto back = read_xy_csv(dir.file("a.csv"));
  EXPECT_EQ(back.x, x);
  EXPECT_EQ(back.y, y);

  spit(dir.file("empty.csv"), "");
  spit(dir.file("header.csv"), "x,y\n");
  spit(dir.file("three.csv"), "x,y\n1,2,3\n");
  spit(dir.file("order.csv"), "x,y\n0.5,1\n0.25,1\n");
  spit(dir.file("text.csv"), "x,y\n0.5,abc\n");
  for (const char* bad : {"empty.csv", "header.csv", "three.csv", "order.csv", "text.csv", "missing.csv"}) {
    EXPECT_THROW(read_xy_csv(dir.file(bad)), DataError) << bad;
  }
}

TEST(BenchConfig, DefaultsMaterialized) {
  const auto plan = make_bench_plan(KeyValues::parse("signals = corner\n"));
  EXPECT_EQ(plan.signals.size(), 1u);
  EXPECT_EQ(plan.experiment.replicates, 100u);
  EXPECT_EQ(plan.experiment.basis.name(), "coif3");
  EXPECT_FALSE(plan.fit_rates);
  for (const auto& key : {"snr", "rho0", "wavelet", "seed", "methods", "rates"}) {
    EXPECT_TRUE(plan.resolved.contains(key)) << key;
  }
}

TEST(BenchConfig, FieldDiagnostics) {
  const auto fails_on = [](const std::string& text, std::size_t line, const std::string& field) {
    try {
      make_bench_plan(KeyValues::parse(text));
      ADD_FAILURE() << text;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.line(), line) << text << ": " << e.what();
      EXPECT_EQ(e.field(), field) << text << ": " << e.what();
    }
  };
  fails_on("signals = spikes\nwavelet = db99\n", 2, "wavelet");
  fails_on("n_values = 1000\n", 1, "n_values");
  fails_on("snr = 4\nrho0 = 0.3\n", 2, "rho0");
  fails_on("bogus = 1\n", 1, "bogus");
  fails_on("signals = spikes\nmethods = soft\n", 2, "methods");
  fails_on("n_values = 256,512\nrates = true\n", 2, "rates");
  fails_on("replicates = 0\n", 1, "replicates");
}

TEST(Commands, SampleDenoiseAndManifestReplay) {
  TempDir dir;
  const auto y = dir.file("y.csv"), f = dir.file("f.csv"), fit = dir.file("fit.csv");
  ASSERT_EQ(nsdwav({"sample", "--signal", "spikes", "--n", "512", "--seed", "3", "--out", y, "--truth-out", f}).code, 0);
  const auto r = nsdwav({"denoise", "--in", y, "--out", fit, "--method", "block", "--wavelet", "coiflet3", "--s", "2",
                         "--truth", f});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("mse "), std::string::npos);
  const std::string first = slurp(fit);
  EXPECT_EQ(first.rfind("x,fitted\n", 0), 0u);
  fs::remove(fit);
  ASSERT_EQ(nsdwav({"denoise", "--manifest", fit + ".manifest"}).code, 0);
  EXPECT_EQ(slurp(fit), first);
  // An explicit flag overrides the manifest.
  ASSERT_EQ(nsdwav({"denoise", "--manifest", fit + ".manifest", "--method", "term"}).code, 0);
  EXPECT_NE(slurp(fit), first);
}

TEST(Commands, DenoiseErrors) {
  TempDir dir;
  spit(dir.file("empty.csv"), "");
  auto r = nsdwav({"denoise", "--in", dir.file("empty.csv"), "--out", dir.file("o.csv")});
  EXPECT_EQ(r.code, kData);
  EXPECT_NE(r.err.find("empty.csv"), std::string::npos);
  spit(dir.file("six.csv"), "x,y\n1,0\n2,0\n3,0\n4,0\n5,0\n6,0\n");
  r = nsdwav({"denoise", "--in", dir.file("six.csv"), "--out", dir.file("o.csv")});
  EXPECT_EQ(r.code, kData);
  EXPECT_NE(r.err.find("power of two"), std::string::npos);
  spit(dir.file("eight.csv"), "x,y\n1,0\n2,0\n3,0\n4,0\n5,0\n6,0\n7,0\n8,1\n");
  r = nsdwav({"denoise", "--in", dir.file("eight.csv"), "--out", dir.file("o.csv"), "--wavelet", "sym4"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_EQ(nsdwav({"denoise", "--out", dir.file("o.csv")}).code, kUsage);
  EXPECT_EQ(nsdwav({"denoise", "--in", dir.file("eight.csv"), "--out", dir.file("o.csv"), "--bogus"}).code, kUsage);
  EXPECT_EQ(nsdwav({}).code, kUsage);
}

TEST(Commands, BenchOutputsAndRepeatability) {
  TempDir dir;
  spit(dir.file("b.cfg"), "signals = spikes,corner\nn_values = 256\nreplicates = 4\n");
  const auto a = dir.file("a"), b = dir.file("b");
  ASSERT_EQ(nsdwav({"bench", dir.file("b.cfg"), "--out", a, "--replicates", "1", "--seed", "7", "--plot"}).code, 0);
  ASSERT_EQ(nsdwav({"bench", dir.file("b.cfg"), "--out", b, "--replicates", "1", "--seed", "7", "--plot"}).code, 0);
  for (const char* name : {"risk.csv", "risk.jsonl", "plot_spikes.svg", "plot_corner.svg"}) {
    EXPECT_EQ(slurp(a + "/" + name), slurp(b + "/" + name)) << name;
  }
  const std::string csv = slurp(a + "/risk.csv");
  EXPECT_EQ(csv.rfind("signal,method,n,mean_mse,sd_mse,replicates,seed\n", 0), 0u);
  EXPECT_NE(csv.find("spikes,block,256,"), std::string::npos);
  EXPECT_NE(csv.find(",1,7\n"), std::string::npos);
  const std::string manifest = slurp(a + "/manifest.txt");
  EXPECT_NE(manifest.find("replicates = 1\n"), std::string::npos);
  EXPECT_NE(manifest.find("seed = 7\n"), std::string::npos);
  // Replay into a fresh directory.
  const auto c = dir.file("c");
  ASSERT_EQ(nsdwav({"bench", "--manifest", a + "/manifest.txt", "--out", c}).code, 0);
  EXPECT_EQ(slurp(c + "/risk.csv"), csv);
}

TEST(Commands, BenchConfigErrorNamesLine) {
  TempDir dir;
  spit(dir.file("bad.cfg"), "signals = spikes\nsnr = four\n");
  const auto r = nsdwav({"bench", dir.file("bad.cfg"), "--out", dir.file("o")});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("snr"), std::string::npos) << r.err;
  EXPECT_EQ(nsdwav({"bench", dir.file("missing.cfg")}).code, kUsage);
}

TEST(Commands, BenchRates) {
  TempDir dir;
  spit(dir.file("r.cfg"), "signals = sine\nn_values = 64,128,256,512\nreplicates = 3\nwavelet = db2\n");
  const auto r = nsdwav({"bench", dir.file("r.cfg"), "--out", dir.file("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string rates = slurp(dir.file("o") + "/rates.csv");
  EXPECT_EQ(rates.rfind("signal,method,covariate,slope,slope_se,intercept,target\n", 0), 0u);
  EXPECT_NE(rates.find("sine,block,log(n),"), std::string::npos);
  EXPECT_NE(r.out.find("target"), std::string::npos);
}

TEST(Commands, NoiseCheck) {
  TempDir dir;
  auto r = nsdwav({"noisecheck", "--rho0", "-0.5", "--n", "64", "--replicates", "4000", "--umax", "4", "--out",
                   dir.file("nc")});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("cov decay v(4)"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir.file("nc") + "/noisecheck.jsonl"));
  r = nsdwav({"noisecheck", "--rho0", "0.3"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("rho0 < 0"), std::string::npos) << r.err;
}

TEST(Commands, ManifestOfOtherCommandRejected) {
  TempDir dir;
  const auto y = dir.file("y.csv");
  ASSERT_EQ(nsdwav({"sample", "--n", "64", "--out", y}).code, 0);
  EXPECT_EQ(nsdwav({"denoise", "--manifest", y + ".manifest"}).code, kUsage);
  EXPECT_EQ(without_timestamp(slurp(y + ".manifest")).find("timestamp"), std::string::npos);
}

}  // namespace
}  // namespace nsdwav::cli
