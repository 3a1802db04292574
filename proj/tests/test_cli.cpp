#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    EXPECT_TRUE(in) << "missing " << p;
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct CliRun {
    int exit_code;
};

CliRun run_cli(const std::string& args) {
    const std::string cmd = std::string(VOLOCC_CLI_PATH) + " " + args +
                            " >/dev/null 2>/tmp/volocc_cli_stderr.txt";
    const int rc = std::system(cmd.c_str());
    return CliRun{WEXITSTATUS(rc)};
}

fs::path make_dir(const std::string& name) {
    const fs::path dir = fs::path(::testing::TempDir()) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

}  // namespace

TEST(Cli, SimulateEstimateDensityPipeline) {
    const auto dir = make_dir("cli_pipeline");
    write_file(dir / "sim.cfg",
               "model.type = cir\n"
               "grid.t = 4\n"
               "grid.n_per_day = 80\n"
               "grid.substeps = 5\n"
               "mc.seed = 42\n");
    ASSERT_EQ(run_cli("simulate --config " + (dir / "sim.cfg").string() + " --out " +
                      (dir / "sim").string())
                  .exit_code,
              0);
    ASSERT_TRUE(fs::exists(dir / "sim" / "prices.csv"));
    ASSERT_TRUE(fs::exists(dir / "sim" / "true_variance.csv"));

    ASSERT_EQ(run_cli("estimate --input " + (dir / "sim" / "prices.csv").string() +
                      " --kn 20 --trunc daily-bv --out " + (dir / "est").string())
                  .exit_code,
              0);
    EXPECT_TRUE(fs::exists(dir / "est" / "spotvol.csv"));
    EXPECT_TRUE(fs::exists(dir / "est" / "occupation.csv"));
    EXPECT_TRUE(fs::exists(dir / "est" / "quantiles.csv"));
    const auto spot = slurp(dir / "est" / "spotvol.csv");
    EXPECT_NE(spot.find("block_index,t_start,v_hat_star,v_hat,threshold_used"),
              std::string::npos);

    ASSERT_EQ(run_cli("density --input " + (dir / "sim" / "prices.csv").string() +
                      " --kn 20 --kernel gaussian --out " + (dir / "dens").string())
                  .exit_code,
              0);
    EXPECT_TRUE(fs::exists(dir / "dens" / "density.csv"));
}

TEST(Cli, ByteIdenticalRerunsForFixedSeed) {
    const auto dir = make_dir("cli_determinism");
    write_file(dir / "mc.cfg",
               "model.type = cir\n"
               "grid.t = 3\n"
               "grid.n_per_day = 80\n"
               "grid.substeps = 2\n"
               "block.k_n = 20\n"
               "mc.replicas = 10\n"
               "mc.seed = 7\n");
    ASSERT_EQ(run_cli("mc --config " + (dir / "mc.cfg").string() + " --workers 1 --out " +
                      (dir / "a").string())
                  .exit_code,
              0);
    ASSERT_EQ(run_cli("mc --config " + (dir / "mc.cfg").string() + " --workers 2 --out " +
                      (dir / "b").string())
                  .exit_code,
              0);
    EXPECT_EQ(slurp(dir / "a" / "mc_report.csv"), slurp(dir / "b" / "mc_report.csv"));
    const auto body = slurp(dir / "a" / "mc_report.csv");
    EXPECT_NE(body.find("model,n,k_n,p0,alpha,true_mean,bias,mad,stderr,replicas,seed"),
              std::string::npos);
    EXPECT_NE(body.find("# mc.seed=7"), std::string::npos);  // config echo
}

TEST(Cli, UnknownConfigKeyFailsLoudly) {
    const auto dir = make_dir("cli_badkey");
    write_file(dir / "bad.cfg",
               "model.type = cir\n"
               "grid.n_per_dya = 80\n");
    const auto run = run_cli("mc --config " + (dir / "bad.cfg").string() + " --out " +
                             (dir / "out").string());
    EXPECT_NE(run.exit_code, 0);
    const auto err = slurp("/tmp/volocc_cli_stderr.txt");
    EXPECT_NE(err.find("grid.n_per_dya"), std::string::npos);
}

TEST(Cli, EvtAndRatesSmoke) {
    const auto dir = make_dir("cli_evt");
    write_file(dir / "evt.cfg",
               "model.type = const\n"
               "model.v = 1\n"
               "grid.t = 11\n"
               "grid.n_per_day = 100\n"
               "grid.substeps = 1\n"
               "trunc.type = none\n"
               "mc.replicas = 25\n"
               "mc.seed = 9\n");
    ASSERT_EQ(run_cli("evt --config " + (dir / "evt.cfg").string() + " --out " +
                      (dir / "evt").string())
                  .exit_code,
              0);
    const auto evt = slurp(dir / "evt" / "evt.csv");
    EXPECT_NE(evt.find("replica,M_n,normalized"), std::string::npos);
    EXPECT_NE(evt.find("# ks="), std::string::npos);

    write_file(dir / "rates.cfg",
               "model.type = cir\n"
               "grid.t = 5\n"
               "grid.substeps = 2\n"
               "rates.ladder = 20,40,80\n"
               "rates.replicas = 10\n"
               "mc.seed = 2\n");
    ASSERT_EQ(run_cli("rates --config " + (dir / "rates.cfg").string() + " --out " +
                      (dir / "rates").string())
                  .exit_code,
              0);
    const auto rates = slurp(dir / "rates" / "rates.csv");
    EXPECT_NE(rates.find("n,delta_n,mean_eta,k_n"), std::string::npos);
    EXPECT_NE(rates.find("slope,"), std::string::npos);
}
