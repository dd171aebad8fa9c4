#include "crawl.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crawl/log_io.hpp"
#include "crawl/scenario.hpp"
#include "crawl/sim.hpp"

struct crawl_config {
  crawl::ScenarioConfig cfg;
};

struct crawl_log {
  crawl::SimLog log;
};

namespace {

void put_error(char* errbuf, size_t errlen, const char* msg) {
  if (errbuf == nullptr || errlen == 0) return;
  std::snprintf(errbuf, errlen, "%s", msg);
}

crawl_status null_argument(const char* name, char* errbuf, size_t errlen) {
  std::string msg = std::string(name) + " is NULL";
  put_error(errbuf, errlen, msg.c_str());
  return CRAWL_ERR_ARGUMENT;
}

/// Heap copy released by crawl_string_free.
crawl_status copy_out(const std::string& s, char** out, char* errbuf,
                      size_t errlen) {
  char* buf = static_cast<char*>(std::malloc(s.size() + 1));
  if (buf == nullptr) {
    put_error(errbuf, errlen, "out of memory");
    return CRAWL_ERR_RUNTIME;
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  *out = buf;
  return CRAWL_OK;
}

/// Run `fn`, translating exceptions into status codes + error text.
template <typename Fn>
crawl_status guarded(char* errbuf, size_t errlen, Fn&& fn) {
  try {
    return fn();
  } catch (const crawl::ConfigError& e) {
    put_error(errbuf, errlen, e.what());
    return CRAWL_ERR_CONFIG;
  } catch (const std::invalid_argument& e) {
    put_error(errbuf, errlen, e.what());
    return CRAWL_ERR_ARGUMENT;
  } catch (const std::domain_error& e) {
    put_error(errbuf, errlen, e.what());
    return CRAWL_ERR_ARGUMENT;
  } catch (const std::exception& e) {
    put_error(errbuf, errlen, e.what());
    return CRAWL_ERR_RUNTIME;
  } catch (...) {
    put_error(errbuf, errlen, "unknown error");
    return CRAWL_ERR_RUNTIME;
  }
}

}  // namespace

extern "C" {

const char* crawl_status_name(crawl_status status) {
  switch (status) {
    case CRAWL_OK:
      return "ok";
    case CRAWL_ERR_ARGUMENT:
      return "argument error";
    case CRAWL_ERR_CONFIG:
      return "config error";
    case CRAWL_ERR_IO:
      return "io error";
    case CRAWL_ERR_RUNTIME:
      return "runtime error";
  }
  return "unknown status";
}

crawl_config* crawl_config_default(void) {
  return new (std::nothrow) crawl_config{};
}

crawl_status crawl_config_parse(const char* text, crawl_config** out,
                                char* errbuf, size_t errlen) {
  if (text == nullptr) return null_argument("text", errbuf, errlen);
  if (out == nullptr) return null_argument("out", errbuf, errlen);
  return guarded(errbuf, errlen, [&] {
    auto cfg = crawl::parse_config(text);
    *out = new crawl_config{std::move(cfg)};
    return CRAWL_OK;
  });
}

crawl_status crawl_config_load(const char* path, crawl_config** out,
                               char* errbuf, size_t errlen) {
  if (path == nullptr) return null_argument("path", errbuf, errlen);
  if (out == nullptr) return null_argument("out", errbuf, errlen);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::string msg = std::string("cannot open: ") + path;
    put_error(errbuf, errlen, msg.c_str());
    return CRAWL_ERR_IO;
  }
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) {
    std::string msg = std::string("read failed: ") + path;
    put_error(errbuf, errlen, msg.c_str());
    return CRAWL_ERR_IO;
  }
  return crawl_config_parse(text.str().c_str(), out, errbuf, errlen);
}

crawl_status crawl_config_set(crawl_config* config, const char* path,
                              const char* value, char* errbuf, size_t errlen) {
  if (config == nullptr) return null_argument("config", errbuf, errlen);
  if (path == nullptr) return null_argument("path", errbuf, errlen);
  if (value == nullptr) return null_argument("value", errbuf, errlen);
  return guarded(errbuf, errlen, [&] {
    crawl::set_config_value(config->cfg, path, value);
    return CRAWL_OK;
  });
}

crawl_status crawl_config_serialize(const crawl_config* config, char** out,
                                    char* errbuf, size_t errlen) {
  if (config == nullptr) return null_argument("config", errbuf, errlen);
  if (out == nullptr) return null_argument("out", errbuf, errlen);
  return guarded(errbuf, errlen, [&] {
    return copy_out(crawl::serialize_config(config->cfg), out, errbuf, errlen);
  });
}

void crawl_config_free(crawl_config* config) { delete config; }

crawl_status crawl_run(const crawl_config* config, crawl_log** out,
                       char* errbuf, size_t errlen) {
  if (config == nullptr) return null_argument("config", errbuf, errlen);
  if (out == nullptr) return null_argument("out", errbuf, errlen);
  return guarded(errbuf, errlen, [&] {
    auto log = crawl::run_scenario(config->cfg);
    *out = new crawl_log{std::move(log)};
    return CRAWL_OK;
  });
}

void crawl_log_free(crawl_log* log) { delete log; }

crawl_status crawl_log_csv(const crawl_log* log, char** out, char* errbuf,
                           size_t errlen) {
  if (log == nullptr) return null_argument("log", errbuf, errlen);
  if (out == nullptr) return null_argument("out", errbuf, errlen);
  return guarded(errbuf, errlen, [&] {
    return copy_out(crawl::log_csv_string(log->log), out, errbuf, errlen);
  });
}

crawl_status crawl_log_summary_json(const crawl_log* log, char** out,
                                    char* errbuf, size_t errlen) {
  if (log == nullptr) return null_argument("log", errbuf, errlen);
  if (out == nullptr) return null_argument("out", errbuf, errlen);
  return guarded(errbuf, errlen, [&] {
    return copy_out(crawl::summary_json(log->log), out, errbuf, errlen);
  });
}

crawl_status crawl_log_stats(const crawl_log* log, crawl_run_stats* out) {
  if (log == nullptr || out == nullptr) return CRAWL_ERR_ARGUMENT;
  const crawl::RunSummary& s = log->log.summary;
  std::memset(out, 0, sizeof(*out));
  out->ticks = s.ticks;
  out->duration = s.duration;
  out->distance_xy = s.distance_xy;
  out->min_margin = s.min_margin;
  out->margin_violations = s.margin_violations;
  out->touchdowns = s.touchdowns;
  out->touchdowns_search = s.touchdowns_search;
  out->step_reflexes = s.step_reflexes;
  out->missed_reflexes = s.missed_reflexes;
  out->height_reflexes = s.height_reflexes;
  out->stumbles = s.stumbles;
  out->kinematic_errors = s.kinematic_errors;
  out->resequences = s.resequences;
  out->divergence = s.divergence ? 1 : 0;
  out->halted = s.halted ? 1 : 0;
  std::snprintf(out->halt_reason, sizeof(out->halt_reason), "%s",
                s.halt_reason.c_str());
  for (int i = 0; i < 3; ++i) out->final_com[i] = s.final_com[i];
  out->grf_error_rms = s.grf_error_rms;
  return CRAWL_OK;
}

crawl_status crawl_plot_channels(const char* csv_text,
                                 const char* const* channels,
                                 size_t n_channels, char** out, char* errbuf,
                                 size_t errlen) {
  if (csv_text == nullptr) return null_argument("csv_text", errbuf, errlen);
  if (out == nullptr) return null_argument("out", errbuf, errlen);
  if (n_channels > 0 && channels == nullptr)
    return null_argument("channels", errbuf, errlen);
  return guarded(errbuf, errlen, [&] {
    std::vector<std::string> names;
    names.reserve(n_channels);
    for (size_t i = 0; i < n_channels; ++i) {
      if (channels[i] == nullptr)
        throw std::invalid_argument("channel name is NULL");
      names.emplace_back(channels[i]);
    }
    std::istringstream in(csv_text);
    return copy_out(crawl::plot_channels(in, names), out, errbuf, errlen);
  });
}

void crawl_string_free(char* s) { std::free(s); }

}  // extern "C"
