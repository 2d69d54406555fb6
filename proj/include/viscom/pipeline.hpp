#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "viscom/dataset.hpp"
#include "viscom/ingest.hpp"
#include "viscom/instructions.hpp"
#include "viscom/lexicon.hpp"
#include "viscom/seen_builder.hpp"
#include "viscom/unseen_builder.hpp"

namespace viscom {

// Applies fn(i) for i in [0, n) on up to `workers` threads and returns the
// results in index order. The first exception thrown by any task is rethrown.
template <typename Fn>
auto parallel_map(std::size_t n, unsigned workers, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<Result> results(n);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            results[i] = fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

struct PipelineOptions {
  double tau = 0.5;
  bool with_seen = true;
  bool with_unseen = true;
  bool dedup_unseen_against_seen = true;
  unsigned workers = 1;
};

struct PipelineResult {
  std::vector<DatasetRecord> records;
  Diagnostics diagnostics;
};

// Builds one record per image in corpus order. `kb` may be null when Unseen
// triples are not requested.
inline PipelineResult run_pipeline(const SceneCorpus& corpus, const KbIndex* kb, const Lexicon& lex,
                                   const PipelineOptions& opts) {
  if (opts.with_unseen && kb == nullptr) throw Error(ErrorKind::InvalidConfig, "unseen build needs a KB");
  if (!(opts.tau > 0.0 && opts.tau <= 1.0)) throw Error(ErrorKind::InvalidConfig, "tau must lie in (0, 1]");
  struct PerImage {
    DatasetRecord record;
    Diagnostics diagnostics;
  };
  const auto& images = corpus.images();
  auto built = parallel_map(images.size(), opts.workers, [&](std::size_t i) {
    const Image& image = images[i];
    PerImage out;
    auto seen = build_seen(image, lex, SeenOptions{opts.tau}, &out.diagnostics);
    std::vector<CommonsenseTriple> unseen;
    if (opts.with_unseen) unseen = build_unseen(image, *kb, lex, seen, UnseenOptions{opts.dedup_unseen_against_seen});
    if (!opts.with_seen) seen.clear();
    out.record = assemble_record(image, seen, unseen);
    return out;
  });
  PipelineResult result;
  result.records.reserve(built.size());
  for (auto& b : built) {
    result.records.push_back(std::move(b.record));
    result.diagnostics += b.diagnostics;
  }
  return result;
}

inline std::vector<InstructionSample> build_all_instruction_samples(const std::vector<DatasetRecord>& records,
                                                                    const ExportConfig& cfg, unsigned workers = 1) {
  cfg.validate();
  auto per_record = parallel_map(records.size(), workers,
                                 [&](std::size_t i) { return build_instruction_samples(records[i], cfg); });
  std::vector<InstructionSample> out;
  for (auto& v : per_record) out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  return out;
}

inline std::string diagnostics_json(const Diagnostics& d) {
  nlohmann::ordered_json j;
  j["record"] = "diagnostics";
  j["scene_triples"] = d.scene_triples;
  j["not_mapped"] = d.not_mapped;
  j["phrases"] = d.phrases;
  j["unparseable"] = d.unparseable;
  j["no_match"] = d.no_match;
  j["ambiguous"] = d.ambiguous;
  j["region_triples"] = d.region_triples;
  j["tail_grounded"] = d.tail_grounded;
  j["tail_text_only"] = d.tail_text_only;
  j["skip_rate"] = d.skip_rate();
  return j.dump();
}

}  // namespace viscom
