#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#ifndef INTERF_CLI
#error "INTERF_CLI must name the interf executable"
#endif

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string &args) {
    const std::string cmd = std::string(INTERF_CLI) + " " + args + " 2>/dev/null";
    FILE *p = popen(cmd.c_str(), "r");
    if (!p)
        return {-1, {}};
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0)
        out.append(buf, n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::string> lines(const std::string &s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);)
        out.push_back(l);
    return out;
}

// data rows split into fields, after the header line
std::vector<std::vector<std::string>> rows(const std::string &s, std::string *header = nullptr) {
    std::vector<std::vector<std::string>> out;
    bool seen_header = false;
    for (const auto &l : lines(s)) {
        if (l.empty() || l[0] == '#')
            continue;
        if (!seen_header) {
            seen_header = true;
            if (header)
                *header = l;
            continue;
        }
        std::vector<std::string> f;
        std::string cur;
        for (char c : l) {
            if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        f.push_back(cur);
        out.push_back(f);
    }
    return out;
}

bool has_line(const std::string &s, const std::string &prefix) {
    for (const auto &l : lines(s))
        if (l.rfind(prefix, 0) == 0)
            return true;
    return false;
}

std::filesystem::path temp_file(const std::string &name) {
    return std::filesystem::temp_directory_path() / ("interf_cli_" + name);
}

} // namespace

TEST(Cli, InterferogramHeaderAndMetadata) {
    const auto r = run("interferogram --points 5");
    ASSERT_EQ(r.code, 0);
    std::string header;
    const auto data = rows(r.out, &header);
    EXPECT_EQ(header, "phi,mean_numeric,mean_analytic,classical");
    EXPECT_EQ(data.size(), 5u);
    for (const char *key : {"# tool:", "# convention:", "# tail_tol:", "# fd_step:", "# seed:"})
        EXPECT_TRUE(has_line(r.out, key)) << key;
    EXPECT_TRUE(has_line(r.out, "# convention: real-hadamard-bs/dark-port-A"));
}

TEST(Cli, TwoPointsTwoRows) {
    const auto r = run("interferogram --points 2 --nbar 4");
    ASSERT_EQ(r.code, 0);
    const auto data = rows(r.out);
    ASSERT_EQ(data.size(), 2u);
    EXPECT_LT(std::stod(data[0][0]), std::stod(data[1][0]));
}

TEST(Cli, GaussianPeakWidth) {
    const auto r = run("interferogram --scheme mu --nbar 100 --phi-min -0.1 --phi-max 0.1 --points 3");
    ASSERT_EQ(r.code, 0);
    const auto data = rows(r.out);
    ASSERT_EQ(data.size(), 3u);
    EXPECT_NEAR(std::stod(data[1][1]), 1.0, 1e-11);
    EXPECT_NEAR(std::stod(data[2][1]), 0.6068, 1e-4);
    EXPECT_NEAR(std::stod(data[2][1]), std::stod(data[2][2]), 1e-11);
    // fields carry 12 significant digits
    EXPECT_LE(data[2][1].size(), std::string("0.606773046624").size() + 1);
}

TEST(Cli, NoonPeakToPeak) {
    const auto r = run("interferogram --scheme noon --nbar 10 --order 10 --points 629");
    ASSERT_EQ(r.code, 0);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto &f : rows(r.out)) {
        lo = std::min(lo, std::stod(f[1]));
        hi = std::max(hi, std::stod(f[1]));
    }
    EXPECT_NEAR(hi - lo, 4.88e-4, 0.01e-4);
}

TEST(Cli, SensitivityShotNoiseMinimum) {
    const auto r = run("sensitivity --scheme mu --nbar 100 --phi-min -0.39269908169872414 "
                       "--phi-max 0.39269908169872414 --points 101");
    ASSERT_EQ(r.code, 0);
    std::string header;
    const auto data = rows(r.out, &header);
    EXPECT_EQ(header, "phi,sens_sq_numeric,sens_sq_analytic,snl_sq,hl_sq");
    double best = std::numeric_limits<double>::infinity();
    bool saw_empty_numeric = false;
    for (const auto &f : data) {
        ASSERT_EQ(f.size(), 5u);
        for (const auto &x : f) {
            EXPECT_EQ(x.find("nan"), std::string::npos);
            EXPECT_EQ(x.find("inf"), std::string::npos);
        }
        if (f[1].empty())
            saw_empty_numeric = true;
        best = std::min(best, std::stod(f[2]));
        EXPECT_EQ(f[3], "0.01");
        EXPECT_EQ(f[4], "0.0001");
    }
    EXPECT_NEAR(best, 0.01, 1e-6);
    // phi = 0 lies on the grid and is stationary for the numeric slope
    EXPECT_TRUE(saw_empty_numeric);
}

TEST(Cli, SensitivityEmptyWhereUndefined) {
    const auto r = run("sensitivity --scheme noon --nbar 2 --order 2 --phi-min -1 --phi-max 1 --points 3");
    ASSERT_EQ(r.code, 0);
    const auto data = rows(r.out);
    ASSERT_EQ(data.size(), 3u);
    EXPECT_TRUE(data[1][1].empty());
    EXPECT_TRUE(data[1][2].empty());
    EXPECT_FALSE(data[0][2].empty());
}

TEST(Cli, NoonSensitivityMinimum) {
    const auto r = run("sensitivity --scheme noon --nbar 2 --order 2 --phi-min 0.7 --phi-max 0.87 --points 171");
    ASSERT_EQ(r.code, 0);
    double best = std::numeric_limits<double>::infinity();
    for (const auto &f : rows(r.out))
        best = std::min(best, std::stod(f[1]));
    EXPECT_NEAR(best, 1.847, 1e-3);
}

TEST(Cli, ValidateDefaultPasses) {
    const auto r = run("validate");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(has_line(r.out, "validation passed"));
    EXPECT_TRUE(has_line(r.out, "identity "));
}

TEST(Cli, ValidateFlippedConventionFails) {
    const auto r = run("validate --flip-convention --grid-nbar 1,4 --points 9");
    EXPECT_EQ(r.code, 1);
    EXPECT_TRUE(has_line(r.out, "validation FAILED"));
    bool identity_flagged = false;
    for (const auto &l : lines(r.out))
        if (l.rfind("identity ", 0) == 0 && l.find("FAIL") != std::string::npos)
            identity_flagged = true;
    EXPECT_TRUE(identity_flagged);
}

TEST(Cli, ValidateCoarseTail) {
    const auto r = run("validate --tail-tol 1e-3");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(has_line(r.out, "# tolerance: abs 0.008 rel 0.008"));
}

TEST(Cli, MonteCarloDeterministic) {
    const std::string args = "montecarlo --nbar 100 --phi 0.02 --shots 1000,10000 --trials 40 --seed 3";
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    std::string header;
    const auto data = rows(a.out, &header);
    EXPECT_EQ(header, "shots,trials,dphi_empirical,dphi_predicted");
    ASSERT_EQ(data.size(), 2u);
    EXPECT_EQ(data[0][0], "1000");
    EXPECT_EQ(data[1][0], "10000");
    EXPECT_TRUE(has_line(a.out, "# seed: 3"));
}

TEST(Cli, MonteCarloShotNoise) {
    const auto r = run("montecarlo --nbar 100 --phi 0.02 --shots 10000 --trials 200");
    ASSERT_EQ(r.code, 0);
    const auto data = rows(r.out);
    ASSERT_EQ(data.size(), 1u);
    const double ratio = std::stod(data[0][2]) / std::stod(data[0][3]);
    EXPECT_GE(ratio, 0.85);
    EXPECT_LE(ratio, 1.15);
}

TEST(Cli, MonteCarloSingleTrial) {
    const auto r = run("montecarlo --nbar 100 --phi 0.1 --shots 1000 --trials 1");
    ASSERT_EQ(r.code, 0);
    const auto data = rows(r.out);
    ASSERT_EQ(data.size(), 1u);
    EXPECT_TRUE(data[0][2].empty());
    EXPECT_FALSE(data[0][3].empty());
}

TEST(Cli, ConfigFileAndPrecedence) {
    const auto cfg = temp_file("precedence.ini");
    {
        std::ofstream f(cfg);
        f << "scheme = nu\nnbar = 4\npoints = 7\nseed = 11\n";
    }
    const auto r = run("interferogram --config " + cfg.string() + " --points 3");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(rows(r.out).size(), 3u);
    EXPECT_TRUE(has_line(r.out, "# scheme: nu"));
    EXPECT_TRUE(has_line(r.out, "# nbar: 4"));
    EXPECT_TRUE(has_line(r.out, "# seed: 11"));
    std::filesystem::remove(cfg);
}

TEST(Cli, HyphenatedConfigKeys) {
    const auto cfg = temp_file("keys.ini");
    {
        std::ofstream f(cfg);
        f << "tail-tol = 1e-6\nphi-min = -0.5\nphi-max = 0.5\npoints = 3\n";
    }
    const auto r = run("interferogram --config " + cfg.string());
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(has_line(r.out, "# tail_tol: 1e-06"));
    const auto data = rows(r.out);
    ASSERT_EQ(data.size(), 3u);
    EXPECT_EQ(data[0][0], "-0.5");
    std::filesystem::remove(cfg);
}

TEST(Cli, OutputFile) {
    const auto path = temp_file("out.csv");
    const auto r = run("interferogram --points 4 --out " + path.string());
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    EXPECT_EQ(rows(ss.str()).size(), 4u);
    std::filesystem::remove(path);
}

TEST(Cli, ConfigurationErrors) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("interferogram --points 1").code, 2);
    EXPECT_EQ(run("interferogram --phi-min 1 --phi-max 0").code, 2);
    EXPECT_EQ(run("interferogram --scheme bogus").code, 2);
    EXPECT_EQ(run("interferogram --tail-tol 0").code, 2);
    EXPECT_EQ(run("interferogram --nbar -3").code, 2);
    EXPECT_EQ(run("sensitivity --nbar 0").code, 2);
    EXPECT_EQ(run("interferogram --config /nonexistent/interf.ini").code, 2);
    EXPECT_EQ(run("montecarlo --phi 0").code, 2);
    EXPECT_EQ(run("--points 3").code, 2);
}

TEST(Cli, DegreesRejected) {
    EXPECT_EQ(run("interferogram --phi-max 180deg").code, 2);
    EXPECT_EQ(run("interferogram --phi-max 180°").code, 2);
}

TEST(Cli, BadConfigKey) {
    const auto cfg = temp_file("bad.ini");
    {
        std::ofstream f(cfg);
        f << "nbar = lots\n";
    }
    EXPECT_EQ(run("interferogram --config " + cfg.string()).code, 2);
    std::filesystem::remove(cfg);
}
