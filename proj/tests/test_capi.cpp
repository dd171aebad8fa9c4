#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "crawl.h"

namespace {

std::string errbuf_str(const char* buf) { return std::string(buf); }

int count_lines(const char* text) {
  int n = 0;
  for (const char* p = text; *p; ++p)
    if (*p == '\n') ++n;
  return n;
}

const char* kWalkScenario =
    "[profile]\n"
    "0  0.3  0  0\n"
    "[sim]\n"
    "duration = 0.8\n"
    "seed = 7\n";

}  // namespace

TEST_CASE("status names are stable") {
  CHECK(std::strcmp(crawl_status_name(CRAWL_OK), "ok") == 0);
  CHECK(std::strcmp(crawl_status_name(CRAWL_ERR_ARGUMENT), "argument error") == 0);
  CHECK(std::strcmp(crawl_status_name(CRAWL_ERR_CONFIG), "config error") == 0);
  CHECK(std::strcmp(crawl_status_name(CRAWL_ERR_IO), "io error") == 0);
  CHECK(std::strcmp(crawl_status_name(CRAWL_ERR_RUNTIME), "runtime error") == 0);
  CHECK(std::strcmp(crawl_status_name(static_cast<crawl_status>(99)),
                    "unknown status") == 0);
}

TEST_CASE("default config round-trips through serialize/parse") {
  crawl_config* cfg = crawl_config_default();
  REQUIRE(cfg != nullptr);

  char err[256] = {};
  char* text1 = nullptr;
  REQUIRE(crawl_config_serialize(cfg, &text1, err, sizeof err) == CRAWL_OK);
  CHECK(std::string(text1).find("[robot]") != std::string::npos);
  CHECK(std::string(text1).find("mass = 85") != std::string::npos);

  crawl_config* cfg2 = nullptr;
  REQUIRE(crawl_config_parse(text1, &cfg2, err, sizeof err) == CRAWL_OK);
  char* text2 = nullptr;
  REQUIRE(crawl_config_serialize(cfg2, &text2, err, sizeof err) == CRAWL_OK);
  CHECK(std::string(text1) == std::string(text2));

  crawl_string_free(text1);
  crawl_string_free(text2);
  crawl_config_free(cfg2);
  crawl_config_free(cfg);
}

TEST_CASE("set overrides values and revalidates") {
  crawl_config* cfg = crawl_config_default();
  REQUIRE(cfg != nullptr);
  char err[256] = {};

  CHECK(crawl_config_set(cfg, "sim.seed", "42", err, sizeof err) == CRAWL_OK);
  char* text = nullptr;
  REQUIRE(crawl_config_serialize(cfg, &text, err, sizeof err) == CRAWL_OK);
  CHECK(std::string(text).find("seed = 42") != std::string::npos);
  crawl_string_free(text);

  CHECK(crawl_config_set(cfg, "sim.dt", "-1", err, sizeof err) ==
        CRAWL_ERR_CONFIG);
  CHECK(errbuf_str(err).find("dt") != std::string::npos);

  CHECK(crawl_config_set(cfg, "nope.key", "1", err, sizeof err) ==
        CRAWL_ERR_CONFIG);
  CHECK(errbuf_str(err).find("unknown section") != std::string::npos);

  CHECK(crawl_config_set(cfg, "nodot", "1", err, sizeof err) ==
        CRAWL_ERR_CONFIG);
  CHECK(errbuf_str(err).find("section.key") != std::string::npos);

  crawl_config_free(cfg);
}

TEST_CASE("parse diagnostics carry line numbers and truncate safely") {
  char err[256] = {};
  crawl_config* cfg = nullptr;
  CHECK(crawl_config_parse("[sim]\ndt = banana\n", &cfg, err, sizeof err) ==
        CRAWL_ERR_CONFIG);
  CHECK(errbuf_str(err).find("line 2") != std::string::npos);
  CHECK(errbuf_str(err).find("dt") != std::string::npos);

  char tiny[8];
  std::memset(tiny, 'x', sizeof tiny);
  CHECK(crawl_config_parse("[sim]\ndt = banana\n", &cfg, tiny, sizeof tiny) ==
        CRAWL_ERR_CONFIG);
  CHECK(std::strlen(tiny) == sizeof tiny - 1);  // truncated, NUL-terminated
  CHECK(std::strncmp(tiny, err, sizeof tiny - 1) == 0);
}

TEST_CASE("load distinguishes io errors from config errors") {
  char err[256] = {};
  crawl_config* cfg = nullptr;
  CHECK(crawl_config_load("/no/such/file.cfg", &cfg, err, sizeof err) ==
        CRAWL_ERR_IO);
  CHECK(errbuf_str(err).find("cannot open") != std::string::npos);

  const auto path =
      std::filesystem::temp_directory_path() / "capi_scenario.cfg";
  std::ofstream(path) << kWalkScenario;
  REQUIRE(crawl_config_load(path.string().c_str(), &cfg, err, sizeof err) ==
          CRAWL_OK);
  REQUIRE(cfg != nullptr);
  crawl_config_free(cfg);
}

TEST_CASE("null arguments are rejected with named messages") {
  char err[128] = {};
  crawl_config* cfg = nullptr;
  char* text = nullptr;
  crawl_log* log = nullptr;
  crawl_run_stats stats{};

  CHECK(crawl_config_parse(nullptr, &cfg, err, sizeof err) ==
        CRAWL_ERR_ARGUMENT);
  CHECK(errbuf_str(err) == "text is NULL");
  CHECK(crawl_config_parse("x", nullptr, err, sizeof err) ==
        CRAWL_ERR_ARGUMENT);
  CHECK(crawl_config_load(nullptr, &cfg, err, sizeof err) ==
        CRAWL_ERR_ARGUMENT);
  CHECK(crawl_config_set(nullptr, "a.b", "1", err, sizeof err) ==
        CRAWL_ERR_ARGUMENT);
  CHECK(crawl_config_serialize(nullptr, &text, err, sizeof err) ==
        CRAWL_ERR_ARGUMENT);
  CHECK(crawl_run(nullptr, &log, err, sizeof err) == CRAWL_ERR_ARGUMENT);
  CHECK(crawl_log_csv(nullptr, &text, err, sizeof err) == CRAWL_ERR_ARGUMENT);
  CHECK(crawl_log_summary_json(nullptr, &text, err, sizeof err) ==
        CRAWL_ERR_ARGUMENT);
  CHECK(crawl_log_stats(nullptr, &stats) == CRAWL_ERR_ARGUMENT);
  CHECK(crawl_plot_channels(nullptr, nullptr, 0, &text, err, sizeof err) ==
        CRAWL_ERR_ARGUMENT);

  // Free functions tolerate NULL.
  crawl_config_free(nullptr);
  crawl_log_free(nullptr);
  crawl_string_free(nullptr);
}

TEST_CASE("run yields csv, json summary and stats") {
  char err[256] = {};
  crawl_config* cfg = nullptr;
  REQUIRE(crawl_config_parse(kWalkScenario, &cfg, err, sizeof err) == CRAWL_OK);

  crawl_log* log = nullptr;
  REQUIRE(crawl_run(cfg, &log, err, sizeof err) == CRAWL_OK);
  REQUIRE(log != nullptr);

  char* csv = nullptr;
  REQUIRE(crawl_log_csv(log, &csv, err, sizeof err) == CRAWL_OK);
  CHECK(std::strncmp(csv, "# crawl-log v1\n", 15) == 0);
  CHECK(count_lines(csv) == 202);  // schema + header + 0.8 s / 0.004 s rows

  char* json = nullptr;
  REQUIRE(crawl_log_summary_json(log, &json, err, sizeof err) == CRAWL_OK);
  CHECK(std::string(json).find("\"schema\": \"crawl-summary v1\"") !=
        std::string::npos);
  CHECK(std::string(json).find("\"ticks\": 200") != std::string::npos);

  crawl_run_stats stats{};
  REQUIRE(crawl_log_stats(log, &stats) == CRAWL_OK);
  CHECK(stats.ticks == 200);
  CHECK(stats.duration == doctest::Approx(0.8));
  CHECK(stats.halted == 0);
  CHECK(std::strlen(stats.halt_reason) == 0);
  CHECK(stats.margin_violations == 0);
  CHECK(stats.distance_xy > 0.0);

  // Same config, same seed: byte-identical artifacts.
  crawl_log* log2 = nullptr;
  REQUIRE(crawl_run(cfg, &log2, err, sizeof err) == CRAWL_OK);
  char* csv2 = nullptr;
  REQUIRE(crawl_log_csv(log2, &csv2, err, sizeof err) == CRAWL_OK);
  CHECK(std::string(csv) == std::string(csv2));

  crawl_string_free(csv2);
  crawl_log_free(log2);

  SUBCASE("plot extracts aligned columns") {
    const char* channels[] = {"t", "zmp_x", "margin"};
    char* table = nullptr;
    REQUIRE(crawl_plot_channels(csv, channels, 3, &table, err, sizeof err) ==
            CRAWL_OK);
    CHECK(table[0] == '#');
    CHECK(count_lines(table) == 201);  // header + one row per tick
    crawl_string_free(table);
  }

  SUBCASE("plot rejects unknown channels listing what exists") {
    const char* channels[] = {"bogus"};
    char* table = nullptr;
    CHECK(crawl_plot_channels(csv, channels, 1, &table, err, sizeof err) ==
          CRAWL_ERR_ARGUMENT);
    CHECK(errbuf_str(err).find("unknown channel: bogus") != std::string::npos);
    CHECK(errbuf_str(err).find("available") != std::string::npos);
  }

  crawl_string_free(json);
  crawl_string_free(csv);
  crawl_log_free(log);
  crawl_config_free(cfg);
}
