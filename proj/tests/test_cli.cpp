#include <gtest/gtest.h>

#include "itergm/cli.hpp"
#include "itergm/errors.hpp"

using namespace itergm;

namespace {

const char* kCircleJob = R"(# linear center
hamiltonian = (x^2 + y^2)/2
commands = certify
)";

const char* kEllipticJob = R"(
hamiltonian = y^2/2 + x^3/3 - x
perturbation.P = x^3 - x + y   # x dH + d(xy)
perturbation.Q = x*y + x
K = 2
K_max = 2
p_interval = [0.3, 1.0]
samples = 5
pf_points = 3
seed = 7
commands = zeros, verify-pf, melnikov, decompose
)";

ConfigError config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    ADD_FAILURE() << "no ConfigError for:\n" << text;
    return ConfigError("", 0, "");
}

}  // namespace

TEST(Config, ParsesAndNormalizes) {
    JobConfig c = parse_config(kEllipticJob);
    EXPECT_EQ(c.perturbation_P, "x^3 - x + y");
    EXPECT_EQ(c.K, 2);
    EXPECT_DOUBLE_EQ(c.p_hi, 1.0);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.commands.size(), 4u);
    // comments and spacing do not change the hash
    JobConfig c2 = parse_config(std::string("# header\n") + kEllipticJob);
    EXPECT_EQ(config_hash(c), config_hash(c2));
    c2.seed = 8;
    EXPECT_NE(config_hash(c), config_hash(c2));
}

TEST(Config, ErrorsNameTheField) {
    ConfigError e = config_error("hamiltonian = x^2 + * y\ncommands = certify\n");
    EXPECT_EQ(e.field(), "hamiltonian");
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(config_error("hamiltonian = x^2\nperturbation.Q = y^^2\ncommands = certify\n").field(),
              "perturbation.Q");
    EXPECT_EQ(config_error("hamiltonian = x^2\ncommands = certify, fly\n").field(), "commands");
    EXPECT_EQ(config_error("hamiltonian = x^2\ncommands = certify\ntol.local = -1\n").field(), "tol.local");
    EXPECT_EQ(config_error("hamiltonian = x^2\ncommands = certify\nK = two\n").field(), "K");
    EXPECT_EQ(config_error("hamiltonian = x^2\ncommands = melnikov\n").field(), "p_interval");
    EXPECT_EQ(config_error("hamiltonian = x^2\ncommands = certify\nbogus = 1\n").line(), 3);
    EXPECT_EQ(config_error("hamiltonian = x^2\nhamiltonian = y^2\ncommands = certify\n").line(), 2);
}

TEST(Fnv, KnownVectors) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Run, CertifyCircle) {
    RunReport r = run(parse_config(kCircleJob));
    ASSERT_TRUE(r.ok) << r.document.dump(2);
    const auto& res = r.document["results"]["certify"];
    EXPECT_EQ(res["status"], "ok");
    EXPECT_EQ(res["result"]["n"], 1);
    EXPECT_EQ(res["result"]["m"], "h");
    EXPECT_EQ(r.document["schema_version"], kSchemaVersion);
    EXPECT_EQ(r.document["config_hash"].get<std::string>().size(), 16u);
    EXPECT_FALSE(r.document.contains("timings"));
    EXPECT_TRUE(r.full().contains("timings"));
}

TEST(Run, DeterministicApartFromTimings) {
    JobConfig c = parse_config(kEllipticJob);
    RunReport a = run(c), b = run(c);
    ASSERT_TRUE(a.ok) << a.document.dump(2);
    EXPECT_EQ(a.document.dump(), b.document.dump());
    EXPECT_EQ(a.csv, b.csv);
    EXPECT_LT(a.document["results"]["verify-pf"]["result"]["max_rel_error"].get<double>(), 1e-6);
    EXPECT_EQ(a.document["results"]["melnikov"]["result"]["order"], 2);
    EXPECT_EQ(a.document["results"]["decompose"]["result"]["residual_zero"], true);
    EXPECT_TRUE(a.csv.count("melnikov_samples.csv"));
}

TEST(Run, FailuresDoNotAbortLaterCommands) {
    // x*y dx keeps the center, so melnikov hits the order cap and zeros depends on it
    JobConfig c = parse_config(R"(
hamiltonian = (x^2 + y^2)/2
perturbation.P = x*y
K = 1
K_max = 2
p_interval = [0.5, 1.5]
samples = 3
commands = certify, melnikov, zeros, connection
)");
    RunReport r = run(c);
    EXPECT_FALSE(r.ok);
    const auto& res = r.document["results"];
    EXPECT_EQ(res["melnikov"]["error"]["kind"], "OrderExceeded");
    EXPECT_EQ(res["zeros"]["status"], "error");
    EXPECT_EQ(res["connection"]["status"], "ok");
    EXPECT_EQ(res["certify"]["status"], "ok");
}
