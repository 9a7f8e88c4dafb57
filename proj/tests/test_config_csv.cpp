#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmarkov/config.hpp"
#include "qmarkov/csv.hpp"
#include "qmarkov/errors.hpp"
#include "qmarkov/master.hpp"
#include "qmarkov/models.hpp"

using namespace qmarkov;
using nlohmann::json;

namespace {

json canned_config() {
    return json::parse(R"({
      "model": {"name": "goldstein", "J": 1.0, "lambda": 0.5, "hbar": 1.0},
      "initial": {"rho0": [[0.5,0.0],[0.5,0.0],[0.5,0.0],[0.5,0.0]]},
      "run": {
        "grid": {"start": 0.0, "stop": 5.0, "steps": 101},
        "n_samples": 1000,
        "seed": 42,
        "observables": {"sz": [[1.0,0.0],[0.0,0.0],[0.0,0.0],[-1.0,0.0]],
                        "sx": [[0.0,0.0],[1.0,0.0],[1.0,0.0],[0.0,0.0]]}
      },
      "outputs": {"directory": "somewhere"}
    })");
}

std::string temp_file(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("canned config parses with defaults resolved") {
    const ExperimentConfig cfg = parse_config(canned_config());
    CHECK(cfg.model.chain.K == 2);
    CHECK(cfg.model.N == 2);
    CHECK(cfg.rho0.size() == 2);                      // shared rho0 expanded per state
    CHECK(cfg.rho0[0](0, 1) == Complex(0.5, 0.0));
    CHECK(cfg.initial_dist(0) == 0.5);                // uniform default
    CHECK(cfg.grid.size() == 101);
    CHECK(cfg.grid.front() == 0.0);
    CHECK(cfg.grid.back() == 5.0);
    CHECK(cfg.n_samples == 1000);
    CHECK(cfg.seed == 42);
    CHECK(cfg.quad_steps == 2048);                    // default
    REQUIRE(cfg.observables.size() == 2);
    CHECK(cfg.observables[0].first == "sx");          // name-sorted
    CHECK(cfg.observables[1].first == "sz");
    REQUIRE(cfg.s_values.size() == 3);                // default Laplace points
    CHECK(cfg.s_values[2] == Complex(2.0, 1.0));
    CHECK(cfg.out_dir == "somewhere");
    CHECK(cfg.model_echo["name"] == "goldstein");
    CHECK(cfg.model_echo["K"] == 2);
}

TEST_CASE("explicit model config builds every structural piece") {
    const json j = json::parse(R"({
      "model": {
        "name": "explicit",
        "N": 2,
        "hbar": 0.8,
        "lambda": [0.5, 2.0],
        "Q": [[0.25, 0.75], [1.0, 0.0]],
        "hamiltonians": [
          [[1.0,0.0],[0.0,0.0],[0.0,0.0],[-1.0,0.0]],
          [[0.0,0.0],[1.0,0.0],[1.0,0.0],[0.0,0.0]]
        ],
        "shocks": [
          {"from": 1, "to": 1, "matrix": [[1.0,0.0],[0.0,0.0],[0.0,0.0],[0.5403023058681398,0.8414709848078965]]},
          {"from": 1, "to": 2, "matrix": [[0.0,0.0],[1.0,0.0],[1.0,0.0],[0.0,0.0]]},
          {"from": 2, "to": 1, "matrix": [[0.0,1.0],[0.0,0.0],[0.0,0.0],[0.0,-1.0]]}
        ]
      },
      "initial": {
        "rho0": [
          [[1.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]],
          [[0.5,0.0],[0.5,0.0],[0.5,0.0],[0.5,0.0]]
        ],
        "distribution": [0.25, 0.75]
      },
      "run": {
        "grid": {"start": 0.0, "stop": 1.0, "steps": 11},
        "s_values": [[0.7, -0.2]],
        "quad_steps": 512
      }
    })");
    const ExperimentConfig cfg = parse_config(j);
    CHECK(cfg.model.hbar == 0.8);
    CHECK(cfg.model.chain.lambda(1) == 2.0);
    CHECK(cfg.model.chain.Q(0, 0) == 0.25);
    CHECK(cfg.model.hamiltonians[1](0, 1) == Complex(1.0, 0.0));
    CHECK(cfg.model.shocks(0, 0)(1, 1) == Complex(0.5403023058681398, 0.8414709848078965));
    CHECK(cfg.model.shocks(1, 0)(0, 0) == Complex(0.0, 1.0));
    CHECK(cfg.rho0[0](0, 0) == Complex(1.0, 0.0));
    CHECK(cfg.rho0[1](1, 0) == Complex(0.5, 0.0));
    CHECK(cfg.initial_dist(1) == 0.75);
    CHECK(cfg.s_values[0] == Complex(0.7, -0.2));
    CHECK(cfg.quad_steps == 512);
    CHECK(cfg.out_dir == "out");  // default
}

TEST_CASE("psi0 expands to a shared pure density matrix") {
    json j = canned_config();
    j["initial"].erase("rho0");
    j["initial"]["psi0"] = json::array({json::array({0.6, 0.0}), json::array({0.0, 0.8})});
    const ExperimentConfig cfg = parse_config(j);
    REQUIRE(cfg.rho0.size() == 2);
    // Products like 0.8 * 0.8 land one ulp away from the decimal literals, so
    // compare within a few eps rather than exactly.
    CHECK(std::abs(cfg.rho0[0](0, 0) - Complex(0.36, 0.0)) <= 1e-15);
    CHECK(std::abs(cfg.rho0[0](1, 1) - Complex(0.64, 0.0)) <= 1e-15);
    CHECK(std::abs(cfg.rho0[0](0, 1) - Complex(0.0, -0.48)) <= 1e-15);  // 0.6 * conj(0.8i)
}

TEST_CASE("config validation points at the offending path") {
    const auto expect_mention = [](json j, const std::string& fragment) {
        try {
            parse_config(j);
            FAIL_CHECK("expected ValidationError mentioning " << fragment);
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };

    json missing_model = canned_config();
    missing_model.erase("model");
    expect_mention(missing_model, "model");

    json bad_lambda = canned_config();
    bad_lambda["model"]["lambda"] = -0.5;
    expect_mention(bad_lambda, "lambda");

    json bad_rho = canned_config();
    bad_rho["initial"]["rho0"] = json::array(
        {json::array({0.9, 0.0}), json::array({0.0, 0.0}), json::array({0.0, 0.0}),
         json::array({0.0, 0.0})});  // trace != 1
    expect_mention(bad_rho, "initial.rho0");

    json both_inits = canned_config();
    both_inits["initial"]["psi0"] =
        json::array({json::array({1.0, 0.0}), json::array({0.0, 0.0})});
    expect_mention(both_inits, "initial");

    json bad_dist = canned_config();
    bad_dist["initial"]["distribution"] = json::array({0.7, 0.7});
    expect_mention(bad_dist, "distribution");

    json bad_grid = canned_config();
    bad_grid["run"]["grid"]["steps"] = 0;
    expect_mention(bad_grid, "steps");

    json single_point = canned_config();
    single_point["run"]["grid"]["steps"] = 1;  // but stop != start
    expect_mention(single_point, "steps");

    json bad_obs = canned_config();
    bad_obs["run"]["observables"]["broken"] = json::array(
        {json::array({0.0, 0.0}), json::array({1.0, 0.0}), json::array({0.0, 0.0}),
         json::array({0.0, 0.0})});  // not Hermitian
    expect_mention(bad_obs, "observables.broken");

    json bad_s = canned_config();
    bad_s["run"]["s_values"] = json::array({json::array({-1.0, 0.0})});
    expect_mention(bad_s, "s_values");

    json unknown_key = canned_config();
    unknown_key["run"]["sample_count"] = 10;  // typo for n_samples
    expect_mention(unknown_key, "sample_count");

    json bad_complex = canned_config();
    bad_complex["initial"]["rho0"][0] = 0.5;  // bare number, not [re, im]
    expect_mention(bad_complex, "rho0");
}

TEST_CASE("load_config reports unreadable files and bad JSON") {
    CHECK_THROWS_AS(load_config("/nonexistent/path/config.json"), ValidationError);
    const std::string path = temp_file("qmarkov_bad.json");
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_config(path), ValidationError);
    std::remove(path.c_str());
}

TEST_CASE("master CSV: shape, 17-digit round trip, LF-only lines") {
    // 3-point grid, 2x2 system, 2 start states -> 4 lines, 17 columns.
    MasterSolution sol;
    sol.grid = {0.0, 0.5, 1.0};
    sol.components.resize(2);
    for (int k = 0; k < 2; ++k)
        for (int ti = 0; ti < 3; ++ti) {
            Matrix m(2, 2);
            m << Complex(1.0 / 3.0 + k, ti * 0.1), Complex(-0.25, 1e-17),
                Complex(0.1 * ti, -7.0 / 9.0), Complex(1e300, -1e-300);
            sol.components[k].push_back(m);
        }
    const std::string path = temp_file("qmarkov_master.csv");
    write_master_csv(sol, path);

    const std::string raw = slurp(path);
    CHECK(raw.find('\r') == std::string::npos);
    CHECK(std::count(raw.begin(), raw.end(), '\n') == 4);  // header + 3 rows
    CHECK(raw.back() == '\n');

    const CsvTable table = read_csv(path);
    REQUIRE(table.header.size() == 17);  // 1 + 2*2*2*2
    CHECK(table.header[0] == "t");
    CHECK(table.header[1] == "re_1_1_1");
    CHECK(table.header[2] == "im_1_1_1");
    CHECK(table.header[16] == "im_2_2_2");
    REQUIRE(table.rows.size() == 3);
    // Bit-exact round trip through the decimal text.
    CHECK(table.rows[1][0] == 0.5);
    CHECK(table.rows[0][1] == 1.0 / 3.0);
    CHECK(table.rows[0][2] == 0.0);
    CHECK(table.rows[0][4] == 1e-17);   // im_1_1_2: tiny value survives
    CHECK(table.rows[2][5] == 0.2);     // re_1_2_1 at ti=2: 0.1*2
    CHECK(table.rows[2][6] == -7.0 / 9.0);
    CHECK(table.rows[0][9] == 1.0 / 3.0 + 1.0);
    CHECK(table.rows[0][7] == 1e300);
    CHECK(table.rows[0][8] == -1e-300);
    std::remove(path.c_str());
}

TEST_CASE("MC CSV carries stderr columns inside each entry group") {
    MCEstimate est;
    est.grid = {0.0, 1.0};
    est.mean.resize(1);
    est.se_re.resize(1);
    est.se_im.resize(1);
    for (int ti = 0; ti < 2; ++ti) {
        Matrix m(2, 2);
        m << Complex(0.5, 0.1), Complex(0.2, -0.3), Complex(0.2, 0.3), Complex(0.5, -0.1);
        est.mean[0].push_back(m);
        RealMatrix se(2, 2);
        se << 0.01, 0.02, 0.03, 0.04;
        est.se_re[0].push_back(se);
        est.se_im[0].push_back(se * 0.5);
    }
    const std::string path = temp_file("qmarkov_mc.csv");
    write_mc_csv(est, path);
    const CsvTable table = read_csv(path);
    REQUIRE(table.header.size() == 1 + 4 * 4);  // K=1, N=2: 4 entries x 4 columns
    CHECK(table.header[1] == "re_1_1_1");
    CHECK(table.header[2] == "im_1_1_1");
    CHECK(table.header[3] == "se_re_1_1_1");
    CHECK(table.header[4] == "se_im_1_1_1");
    CHECK(table.rows[0][3] == 0.01);
    CHECK(table.rows[0][4] == 0.005);
    std::remove(path.c_str());
}

TEST_CASE("observable, z-score, and laplace CSV layouts") {
    const std::string obs_path = temp_file("qmarkov_obs.csv");
    write_observables_csv({0.0, 1.0}, {"sx", "sz"}, {{0.1, 0.2}, {0.9, 0.8}}, obs_path);
    const CsvTable obs = read_csv(obs_path);
    CHECK(obs.header == std::vector<std::string>{"t", "sx", "sz"});
    CHECK(obs.rows[1][1] == 0.2);
    std::remove(obs_path.c_str());

    const std::string z_path = temp_file("qmarkov_z.csv");
    std::vector<std::vector<RealMatrix>> z_re(1), z_im(1);
    RealMatrix z(2, 2);
    z << 0.0, 1.5, 2.5, 4.75;
    z_re[0] = {z, z};
    z_im[0] = {z * 0.5, z * 0.5};
    write_zscore_csv({0.0, 1.0}, z_re, z_im, z_path);
    const CsvTable zt = read_csv(z_path);
    CHECK(zt.header[1] == "z_re_1_1_1");
    CHECK(zt.header[2] == "z_im_1_1_1");
    CHECK(zt.rows[0][3] == 1.5);   // z_re_1_1_2
    CHECK(zt.rows[0][4] == 0.75);  // z_im_1_1_2
    std::remove(z_path.c_str());

    const std::string l_path = temp_file("qmarkov_l.csv");
    write_laplace_csv({Complex(0.5, 0.0), Complex(2.0, 1.0)}, {1e-12, 3e-11}, l_path);
    const CsvTable lt = read_csv(l_path);
    CHECK(lt.header == std::vector<std::string>{"s_re", "s_im", "residual_fro"});
    CHECK(lt.rows[1][1] == 1.0);
    CHECK(lt.rows[1][2] == 3e-11);
    std::remove(l_path.c_str());
}

TEST_CASE("format_g17 round-trips doubles exactly") {
    for (double x : {1.0 / 3.0, 0.1, -0.0, 1e308, 5e-324, 123456789.123456789,
                     2.2250738585072014e-308}) {
        const std::string s = format_g17(x);
        // strtod instead of std::stod: the latter throws out_of_range on
        // subnormals (glibc sets ERANGE even though the value is exact).
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
}
