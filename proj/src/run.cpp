// Copyright 2026 The scorewatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <openssl/evp.h>

#include <array>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <streambuf>
#include <thread>
#include <vector>

#include "scorewatch/error.hpp"
#include "scorewatch/explain.hpp"
#include "scorewatch/monitor.hpp"
#include "scorewatch/report.hpp"
#include "scorewatch/run.hpp"
#include "scorewatch/synthetic.hpp"

namespace scorewatch {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
  }
  void update(const char* data, std::size_t n) {
    if (n > 0 && EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw Error("sha256 update failed");
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) throw Error("sha256 final failed");
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += digits[md[i] >> 4];
      out += digits[md[i] & 15];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

// Passes bytes through from another buffer, hashing them on the way.
class HashingBuf : public std::streambuf {
 public:
  explicit HashingBuf(std::streambuf* source) : source_(source) {}
  std::string finish() {
    while (underflow() != traits_type::eof()) setg(eback(), egptr(), egptr());
    return sha_.hex();
  }

 protected:
  int_type underflow() override {
    if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
    const auto n = source_->sgetn(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (n <= 0) return traits_type::eof();
    sha_.update(buf_.data(), static_cast<std::size_t>(n));
    setg(buf_.data(), buf_.data(), buf_.data() + n);
    return traits_type::to_int_type(*gptr());
  }

 private:
  std::streambuf* source_;
  std::array<char, 1 << 16> buf_{};
  Sha256 sha_;
};

struct ReportPaths {
  std::size_t alarm_id;
  std::string json, markdown, validation, roc;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

// Fixed-size worker pool; reports land on disk in alarm order.
class ReportPool {
 public:
  ReportPool(std::size_t workers, fs::path dir, const FeatureSchema& schema, ReportConfig config)
      : dir_(std::move(dir)), schema_(schema), config_(std::move(config)) {
    for (std::size_t i = 0; i < workers; ++i) threads_.emplace_back([this] { work(); });
  }
  ~ReportPool() { stop(); }

  void submit(AlarmTrigger trigger, std::shared_ptr<const explain::MicFilterResult> filter) {
    {
      std::lock_guard lock(mu_);
      jobs_.push_back({std::move(trigger), std::move(filter)});
    }
    cv_.notify_one();
  }

  // Waits for all jobs; rethrows the first worker failure.
  std::vector<ReportPaths> finish() {
    stop();
    if (failure_) std::rethrow_exception(failure_);
    return std::move(written_);
  }

 private:
  struct Job {
    AlarmTrigger trigger;
    std::shared_ptr<const explain::MicFilterResult> filter;
  };

  void stop() {
    {
      std::lock_guard lock(mu_);
      closing_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) {
      if (t.joinable()) t.join();
    }
  }

  void work() {
    for (;;) {
      Job job;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return closing_ || !jobs_.empty(); });
        if (jobs_.empty()) return;
        job = std::move(jobs_.front());
        jobs_.pop_front();
      }
      try {
        auto report = build_report(job.trigger, *job.filter, schema_, config_);
        std::lock_guard lock(mu_);
        ready_.emplace(job.trigger.alarm_id, std::move(report.document));
        flush_ready();
      } catch (...) {
        std::lock_guard lock(mu_);
        if (!failure_) failure_ = std::current_exception();
      }
    }
  }

  // Caller holds mu_.
  void flush_ready() {
    while (!ready_.empty() && ready_.begin()->first == next_id_) {
      const json& doc = ready_.begin()->second;
      const std::string stem = "alarm_" + std::to_string(next_id_);
      ReportPaths paths{next_id_, "reports/" + stem + ".json", "reports/" + stem + ".md",
                        "reports/" + stem + "_validation.csv", "reports/" + stem + "_roc.csv"};
      write_text(dir_ / paths.json, doc.dump(2) + "\n");
      write_text(dir_ / paths.markdown, render_markdown(doc));
      std::ostringstream v, r;
      write_validation_csv(v, doc);
      write_roc_csv(r, doc);
      write_text(dir_ / paths.validation, v.str());
      write_text(dir_ / paths.roc, r.str());
      written_.push_back(std::move(paths));
      ready_.erase(ready_.begin());
      ++next_id_;
    }
  }

  fs::path dir_;
  const FeatureSchema& schema_;
  ReportConfig config_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Job> jobs_;
  std::map<std::size_t, json> ready_;
  std::vector<ReportPaths> written_;
  std::size_t next_id_ = 0;
  bool closing_ = false;
  std::exception_ptr failure_;
};

// Streaming valley detection: local minima among valley candidates,
// at least spacing events apart, in arrival order.
class ValleyFinder {
 public:
  ValleyFinder(std::ostream& out, std::size_t spacing) : out_(out), spacing_(spacing) {
    out_ << "event_index,timestamp,signal\n";
  }
  void add(const SignalPoint& p) {
    if (cur_) judge(p.signal);
    prev_signal_ = cur_ ? std::optional<double>(cur_->signal) : std::nullopt;
    cur_ = p;
  }
  void finish() {
    if (cur_) judge(std::nullopt);
    cur_.reset();
  }
  std::size_t count() const { return count_; }

 private:
  void judge(std::optional<double> next) {
    const SignalPoint& c = *cur_;
    if (!c.is_valley_candidate) return;
    if (prev_signal_ && *prev_signal_ < c.signal) return;
    if (next && *next < c.signal) return;
    if (last_ && c.event_index - *last_ < spacing_) return;
    last_ = c.event_index;
    ++count_;
    out_ << c.event_index << ',' << c.timestamp << ',' << format_double(c.signal) << '\n';
  }

  std::ostream& out_;
  std::size_t spacing_;
  std::optional<SignalPoint> cur_;
  std::optional<double> prev_signal_;
  std::optional<std::uint64_t> last_;
  std::size_t count_ = 0;
};

StreamFormat format_for(const fs::path& input, const RunConfig& config) {
  if (config.format) return *config.format;
  const auto ext = input.extension().string();
  return ext == ".jsonl" || ext == ".ndjson" ? StreamFormat::jsonl : StreamFormat::csv;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Sha256 sha;
  sha.update(bytes.data(), bytes.size());
  return sha.hex();
}

RunSummary run_monitor(std::istream& input, const std::string& input_name, const FeatureSchema& schema,
                       StreamFormat format, RunConfig config, const fs::path& out) {
  config.finalize();
  fs::create_directories(out / "reports");

  std::ofstream signal_csv(out / "signal.csv", std::ios::binary);
  std::ofstream valley_csv(out / "valleys.csv", std::ios::binary);
  if (!signal_csv || !valley_csv) throw Error("cannot write to " + out.string());
  const bool landmark = config.monitor.track_landmark;
  write_signal_header(signal_csv, landmark);

  HashingBuf hashing(input.rdbuf());
  std::istream hashed(&hashing);
  EventReader reader(hashed, schema, format);

  Monitor monitor(config.monitor);
  ValleyFinder valleys(valley_csv, config.monitor.target_size);
  RunSummary summary;
  std::shared_ptr<const explain::MicFilterResult> filter;
  std::vector<std::string> warnings;

  {
    ReportPool pool(config.report_workers, out, schema, config.report);
    auto dispatch = [&](AlarmTrigger trigger) {
      ++summary.alarms;
      if (!filter) filter = std::make_shared<explain::MicFilterResult>();
      pool.submit(std::move(trigger), filter);
    };

    while (auto event = reader.next()) {
      ++summary.events;
      auto step = monitor.step(std::move(*event));
      if (step.warmed_up_now) {
        const auto snap = monitor.snapshot();
        std::vector<Event> burn_in(snap.reference.begin(), snap.reference.end());
        burn_in.insert(burn_in.end(), snap.target.begin(), snap.target.end());
        filter = std::make_shared<explain::MicFilterResult>(
            explain::time_correlation_filter(burn_in, schema, config.filter));
      }
      if (step.point) {
        ++summary.signal_points;
        write_signal_row(signal_csv, *step.point, landmark);
        valleys.add(*step.point);
      }
      if (step.alarm) dispatch(std::move(*step.alarm));
    }
    if (summary.events == 0) throw StreamError(StreamError::Kind::empty, reader.line(), "empty stream");
    if (auto last = monitor.finish()) dispatch(std::move(*last));
    valleys.finish();
    summary.valleys = valleys.count();
    summary.input_sha256 = hashing.finish();
    if (!filter) warnings.push_back("stream ended before the windows filled; no signal was computed");

    const auto reports = pool.finish();
    signal_csv.flush();
    valley_csv.flush();
    if (!signal_csv || !valley_csv) throw Error("write failed under " + out.string());

    json report_list = json::array();
    for (const auto& r : reports) {
      report_list.push_back({{"alarm_id", r.alarm_id},
                             {"json", r.json},
                             {"markdown", r.markdown},
                             {"validation_csv", r.validation},
                             {"roc_csv", r.roc}});
    }
    json manifest = {
        {"config", config.to_json()},
        {"input", {{"path", input_name}, {"sha256", summary.input_sha256}}},
        {"schema", schema.to_json()},
        {"seed", config.seed},
        {"outputs", {{"signal_csv", "signal.csv"}, {"valleys_csv", "valleys.csv"}, {"reports", report_list}}},
        {"counts",
         {{"events", summary.events},
          {"signal_points", summary.signal_points},
          {"alarms", summary.alarms},
          {"valleys", summary.valleys}}},
        {"time_correlation_filter", filter ? filter->to_json() : json(nullptr)},
        {"warnings", warnings},
    };
    write_text(out / "manifest.json", manifest.dump(2) + "\n");
  }
  return summary;
}

int cmd_monitor(const MonitorArgs& args, std::ostream& err) {
  FeatureSchema schema;
  RunConfig config;
  try {
    schema = FeatureSchema::load(args.schema);
    config = load_config(args.config);
    if (args.seed) config.seed = *args.seed;
    if (args.debug_landmark) config.monitor.track_landmark = true;
    config.finalize();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  std::ifstream input(args.input, std::ios::binary);
  if (!input) {
    err << "error: cannot open input " << args.input.string() << '\n';
    return 1;
  }
  try {
    const auto summary = run_monitor(input, args.input.string(), schema, format_for(args.input, config), config, args.out);
    err << summary.events << " events, " << summary.signal_points << " signal points, " << summary.alarms
        << " alarms, " << summary.valleys << " valleys\n";
    return 0;
  } catch (const StreamError& e) {
    err << "error: " << args.input.string() << ": " << (e.kind() == StreamError::Kind::empty ? "empty stream" : e.what())
        << '\n';
    return 1;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_generate(const fs::path& spec_path, const fs::path& out, std::ostream& err) {
  std::ifstream in(spec_path);
  if (!in) {
    err << "error: cannot open spec " << spec_path.string() << '\n';
    return 1;
  }
  synthetic::SyntheticSpec spec;
  try {
    spec = synthetic::SyntheticSpec::from_json(json::parse(in));
  } catch (const json::exception& e) {
    err << "error: " << spec_path.string() << ": " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << spec_path.string() << ": " << e.what() << '\n';
    return 2;
  }
  try {
    const auto files = synthetic::write(spec, out);
    err << files.events << " events (" << files.drifted << " drifted) -> " << files.stream.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_report(const fs::path& run, std::size_t alarm_id, std::ostream& out, std::ostream& err) {
  std::ifstream manifest_in(run / "manifest.json");
  if (!manifest_in) {
    err << "error: no manifest.json in " << run.string() << '\n';
    return 1;
  }
  try {
    const json manifest = json::parse(manifest_in);
    for (const auto& r : manifest.at("outputs").at("reports")) {
      if (r.at("alarm_id").get<std::size_t>() != alarm_id) continue;
      std::ifstream doc_in(run / r.at("json").get<std::string>());
      if (!doc_in) {
        err << "error: missing report file " << r.at("json").get<std::string>() << '\n';
        return 1;
      }
      out << render_markdown(json::parse(doc_in));
      return 0;
    }
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << "error: unknown alarm id " << alarm_id << '\n';
  return 1;
}

}  // namespace scorewatch
