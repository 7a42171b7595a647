#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "dlecc/dlecc.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  dlecc_string_free(s);
  return out;
}

}  // namespace

TEST_SUITE("capi") {
  TEST_CASE("status and errors") {
    CHECK(std::string(dlecc_status_name(DLECC_OK)) == "ok");
    CHECK(std::string(dlecc_version()).size() > 0);
    dlecc_table* t = nullptr;
    CHECK(dlecc_table_from_json("{", &t) == DLECC_PARSE);
    CHECK(t == nullptr);
    CHECK(std::string(dlecc_last_error()).find("malformed") != std::string::npos);
    const double v[] = {1, 2, 3};
    CHECK(dlecc_table_from_values(2, v, 3, &t) == DLECC_INVALID_ARGUMENT);
    CHECK(dlecc_table_fixture("nope", &t) == DLECC_INVALID_ARGUMENT);
    CHECK(dlecc_table_from_values(1, v, 2, nullptr) == DLECC_INVALID_ARGUMENT);
  }

  TEST_CASE("tables and spectra") {
    dlecc_table* t = nullptr;
    REQUIRE(dlecc_table_fixture("bent4", &t) == DLECC_OK);
    CHECK(dlecc_table_arity(t) == 4);
    dlecc_spectrum* s = nullptr;
    REQUIRE(dlecc_wht_forward(t, &s) == DLECC_OK);
    double c[16];
    size_t n = 0;
    REQUIRE(dlecc_spectrum_coeffs(s, c, 16, &n) == DLECC_OK);
    CHECK(n == 16);
    for (double x : c) CHECK(std::abs(x) == doctest::Approx(0.25));
    char* csv = nullptr;
    size_t entries = 0;
    REQUIRE(dlecc_energy_profile_csv(s, 0.95, &csv, &entries) == DLECC_OK);
    CHECK(entries == 16);
    CHECK(take(csv).rfind("subset_mask,", 0) == 0);
    dlecc_table* back = nullptr;
    REQUIRE(dlecc_wht_inverse(s, &back) == DLECC_OK);
    char* a = nullptr;
    char* b = nullptr;
    dlecc_table_to_json(t, &a);
    dlecc_table_to_json(back, &b);
    CHECK(take(a) == take(b));
    char* names = nullptr;
    REQUIRE(dlecc_fixture_names(&names) == DLECC_OK);
    CHECK(take(names).find("block3") != std::string::npos);
    dlecc_table_free(back);
    dlecc_spectrum_free(s);
    dlecc_table_free(t);
  }

  TEST_CASE("goldreich levin") {
    dlecc_table* t = nullptr;
    REQUIRE(dlecc_table_fixture("block2", &t) == DLECC_OK);
    dlecc_query* q = nullptr;
    REQUIRE(dlecc_query_from_table(t, 100, 0, &q) == DLECC_OK);
    dlecc_gl_config cfg;
    dlecc_gl_config_default(&cfg);
    cfg.gamma = 0.9;
    cfg.seed = 3;
    dlecc_gl_result* r = nullptr;
    REQUIRE(dlecc_goldreich_levin(q, &cfg, &r) == DLECC_OK);
    REQUIRE(dlecc_gl_result_size(r) == 1);
    size_t vars[8];
    size_t count = 0;
    double weight = 0;
    REQUIRE(dlecc_gl_result_set(r, 0, vars, 8, &count, &weight) == DLECC_OK);
    CHECK(count == 4);
    CHECK(std::vector<size_t>(vars, vars + 4) == std::vector<size_t>{1, 3, 4, 5});
    CHECK(weight == doctest::Approx(1.0).epsilon(0.1));
    CHECK(dlecc_query_evaluations(q) == 2 * dlecc_gl_result_total_queries(r));
    CHECK(dlecc_gl_result_same_sets(r, r) == 1);
    char* j = nullptr;
    REQUIRE(dlecc_gl_result_to_json(r, &j) == DLECC_OK);
    CHECK(take(j).find("\"stable\"") != std::string::npos);
    CHECK(dlecc_gl_result_set(r, 5, vars, 8, &count, &weight) == DLECC_INVALID_ARGUMENT);
    dlecc_gl_result_free(r);
    dlecc_query_free(q);
    dlecc_table_free(t);
  }

  TEST_CASE("codec round trip") {
    const double pass[] = {1, 1, -1, -1};
    dlecc_table* t = nullptr;
    REQUIRE(dlecc_table_from_values(2, pass, 4, &t) == DLECC_OK);
    dlecc_encoder* e = nullptr;
    REQUIRE(dlecc_encoder_from_tables(t, t, t, &e) == DLECC_OK);
    CHECK(dlecc_encoder_window(e) == 2);
    double power = 0;
    REQUIRE(dlecc_analytic_power(e, 6, &power) == DLECC_OK);
    CHECK(power == 1.0);
    dlecc_interleaver* pi = nullptr;
    REQUIRE(dlecc_interleaver_random(6, 9, &pi) == DLECC_OK);
    CHECK(dlecc_interleaver_size(pi) == 6);
    const uint8_t u[] = {0, 1, 1, 0, 1, 0};
    double cw[18];
    REQUIRE(dlecc_encode(e, pi, u, 6, cw) == DLECC_OK);
    CHECK(cw[1] == -1.0);
    CHECK(cw[6 + 3] == 1.0);
    double post[6], exact[6];
    REQUIRE(dlecc_turbo_decode(e, pi, cw, 6, 0.5, 6, post) == DLECC_OK);
    REQUIRE(dlecc_brute_force_map(e, pi, cw, 6, 0.5, exact) == DLECC_OK);
    for (int i = 0; i < 6; ++i) CHECK((post[i] > 0.5) == (u[i] == 1));
    double bce = 0, ber = 0;
    REQUIRE(dlecc_bce(u, exact, 6, &bce) == DLECC_OK);
    REQUIRE(dlecc_ber(u, exact, 6, &ber) == DLECC_OK);
    CHECK(ber == 0.0);
    CHECK(bce < 0.01);

    char* j = nullptr;
    REQUIRE(dlecc_encoder_to_json(e, &j) == DLECC_OK);
    dlecc_encoder* e2 = nullptr;
    REQUIRE(dlecc_encoder_from_json(take(j).c_str(), &e2) == DLECC_OK);
    dlecc_encoder* c = nullptr;
    CHECK(dlecc_constrain_power(e2, 6, &c) == DLECC_OK);
    const double flat[] = {2, 2, 2, 2};
    dlecc_table* ft = nullptr;
    dlecc_table_from_values(2, flat, 4, &ft);
    dlecc_encoder* fe = nullptr;
    dlecc_encoder_from_tables(ft, ft, ft, &fe);
    dlecc_encoder* bad = nullptr;
    CHECK(dlecc_constrain_power(fe, 6, &bad) == DLECC_NUMERICAL);
    CHECK(bad == nullptr);
    dlecc_encoder_free(fe);
    dlecc_table_free(ft);
    dlecc_encoder_free(c);
    dlecc_encoder_free(e2);

    const size_t perm[] = {0, 0};
    dlecc_interleaver* bad_pi = nullptr;
    CHECK(dlecc_interleaver_from_perm(perm, 2, &bad_pi) == DLECC_INVALID_ARGUMENT);
    dlecc_interleaver_free(pi);
    dlecc_encoder_free(e);
    dlecc_table_free(t);
  }

  TEST_CASE("metrics") {
    char* csv = nullptr;
    int disjoint = 0;
    REQUIRE(dlecc_counterexample(&csv, &disjoint) == DLECC_OK);
    CHECK(disjoint == 1);
    CHECK(take(csv).find("\"[1,3]\",") != std::string::npos);
    double up = 1, lo = 1;
    REQUIRE(dlecc_bounds(50, &csv, &up, &lo) == DLECC_OK);
    take(csv);
    CHECK(up <= 1e-12);
    CHECK(lo <= 1e-12);
    std::ifstream in(std::string(DLECC_DATA_DIR) + "/counterexample_channel.json");
    const std::string channel((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    double bce = 0, ber = 0;
    REQUIRE(dlecc_discrete_bce_ber(channel.c_str(), 0, 3, &bce, &ber) == DLECC_OK);
    CHECK(std::abs(ber - 0.40275) < 1e-9);
    CHECK(std::abs(bce - 0.9433) < 1e-3);
    REQUIRE(dlecc_discrete_bce_ber(R"({"transition": [[0.9, 0.1], [0.1, 0.9]]})", 0, 1, &bce, &ber) ==
            DLECC_OK);
    CHECK(ber == doctest::Approx(0.1));
    CHECK(bce == doctest::Approx(-0.9 * std::log2(0.9) - 0.1 * std::log2(0.1)));
  }

  TEST_CASE("landscape") {
    const uint32_t ma[] = {16, 19, 21}, mb[] = {17, 22, 25};
    dlecc_theta *a = nullptr, *b = nullptr;
    REQUIRE(dlecc_theta_parity(ma, &a) == DLECC_OK);
    REQUIRE(dlecc_theta_parity(mb, &b) == DLECC_OK);
    dlecc_loss_options o;
    dlecc_loss_options_default(&o);
    CHECK(o.k == 10);
    CHECK(o.blocks == 10000);
    o.k = 8;
    o.blocks = 30;
    const double lambdas[] = {0.0, 0.5, 1.0};
    double losses[3];
    int degenerate[3];
    char* csv = nullptr;
    REQUIRE(dlecc_line_probe(a, b, lambdas, 3, &o, losses, nullptr, degenerate, &csv) == DLECC_OK);
    CHECK(take(csv).rfind("lambda,loss", 0) == 0);
    CHECK(degenerate[1] == 0);
    CHECK(losses[0] > 0.0);
    const double bad[] = {0.2, 0.5};
    CHECK(dlecc_line_probe(a, b, bad, 2, &o, nullptr, nullptr, nullptr, nullptr) == DLECC_INVALID_ARGUMENT);
    char* j = nullptr;
    REQUIRE(dlecc_theta_to_json(a, &j) == DLECC_OK);
    dlecc_theta* partner = nullptr;
    REQUIRE(dlecc_theta_bent_partner(&partner) == DLECC_OK);
    dlecc_theta_free(partner);
    dlecc_theta* a2 = nullptr;
    CHECK(dlecc_theta_from_json(take(j).c_str(), &a2) == DLECC_OK);
    dlecc_theta_free(a2);
    dlecc_theta_free(a);
    dlecc_theta_free(b);
  }

  TEST_CASE("training and evaluation") {
    dlecc_train_config cfg;
    dlecc_train_config_default(&cfg);
    CHECK(cfg.k_enc == 16);
    CHECK(cfg.window == 5);
    cfg.k_enc = 6;
    cfg.window = 3;
    cfg.steps = 4;
    cfg.batch_size = 4;
    cfg.seed = 2;
    dlecc_train_result* r = nullptr;
    REQUIRE(dlecc_train_encoder(&cfg, &r) == DLECC_OK);
    CHECK(dlecc_train_result_aborted(r) == nullptr);
    char* fc = nullptr;
    REQUIRE(dlecc_train_result_fc_csv(r, &fc) == DLECC_OK);
    CHECK(take(fc).rfind("step,stream,subset_mask,coefficient", 0) == 0);
    char* curve = nullptr;
    REQUIRE(dlecc_train_result_curve_csv(r, &curve) == DLECC_OK);
    take(curve);
    dlecc_encoder* e = nullptr;
    REQUIRE(dlecc_train_result_encoder(r, &e) == DLECC_OK);
    double mean = 0, se = 0;
    REQUIRE(dlecc_conditional_entropy(e, 6, 1.0, 50, 1, 1, &mean, &se) == DLECC_OK);
    CHECK(mean > 0.0);
    CHECK(mean < 1.0);
    dlecc_eval_options o;
    dlecc_eval_options_default(&o);
    CHECK(o.k_eval == 100);
    CHECK(o.blocks == 100000);
    o.k_eval = 20;
    o.blocks = 20;
    const double grid[] = {0.0, 2.0};
    char* csv = nullptr;
    dlecc_encoder* re = nullptr;
    REQUIRE(dlecc_evaluate(e, grid, 2, &o, &csv, &re) == DLECC_OK);
    const auto text = take(csv);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    double power = 0;
    dlecc_analytic_power(re, 20, &power);
    CHECK(power == doctest::Approx(1.0));
    cfg.window = 12;
    dlecc_train_result* bad = nullptr;
    CHECK(dlecc_train_encoder(&cfg, &bad) == DLECC_INVALID_ARGUMENT);
    dlecc_encoder_free(re);
    dlecc_encoder_free(e);
    dlecc_train_result_free(r);
  }
}
