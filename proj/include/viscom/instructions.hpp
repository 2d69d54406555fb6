#pragma once

// Instruction-tuning samples: one (instruction, target) pair per object and
// category with at least one triple. Targets join triple tails with the sep
// token: Seen groups contribute a uniform sample of m tails, Unseen groups
// their top-k tails plus j tails sampled from the rest.
//
// Sampling uses a generator seeded per (seed, image, object, category), so
// output does not depend on processing order or worker count.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "viscom/dataset.hpp"
#include "viscom/error.hpp"
#include "viscom/taxonomy.hpp"

namespace viscom {

struct ExportConfig {
  std::uint32_t m = 3;
  std::uint32_t k = 3;
  std::uint32_t j = 2;
  double tau = 0.5;
  std::uint64_t seed = 0;
  std::string sep_token = "[sep]";
  bool dedup_unseen_against_seen = true;
  std::string instruction_template =
      "image {image}: what is the {category} commonsense of the {name} at [{x}, {y}, {w}, {h}] in the image?";
  std::map<std::string, std::string> category_descriptions = default_descriptions();

  static std::map<std::string, std::string> default_descriptions() {
    static const char* kText[CategoryPath::kCount] = {
        "seen property",         "seen located-near",     "seen spatial relatedness",
        "seen capable-of",       "seen receives-action",  "unseen property",
        "unseen created-by",     "unseen located-near",   "unseen capable-of",
        "unseen used-for",       "unseen receives-action",
    };
    std::map<std::string, std::string> out;
    for (auto c : CategoryPath::all()) out[c.str()] = kText[c.index()];
    return out;
  }

  void validate() const {
    if (m < 1) throw Error(ErrorKind::InvalidConfig, "m must be at least 1");
    if (k + j < 1) throw Error(ErrorKind::InvalidConfig, "k + j must be at least 1");
    if (!(tau > 0.0 && tau <= 1.0)) throw Error(ErrorKind::InvalidConfig, "tau must lie in (0, 1]");
    if (sep_token.empty()) throw Error(ErrorKind::InvalidConfig, "sep token must not be empty");
    for (auto c : CategoryPath::all()) {
      if (!category_descriptions.contains(c.str())) {
        throw Error(ErrorKind::InvalidConfig, "missing description for " + c.str());
      }
    }
  }

  // Overrides fields present in a JSON object; unknown keys are rejected.
  void apply_json(const nlohmann::json& j_cfg) {
    if (!j_cfg.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");
    auto count = [](const nlohmann::json& v, const std::string& key) {
      if (!v.is_number_unsigned() || v.get<std::uint64_t>() > UINT32_MAX) {
        throw Error(ErrorKind::InvalidConfig, key + " must be a non-negative integer");
      }
      return v.get<std::uint32_t>();
    };
    try {
      for (const auto& [key, value] : j_cfg.items()) {
        if (key == "m") {
          m = count(value, key);
        } else if (key == "k") {
          k = count(value, key);
        } else if (key == "j") {
          j = count(value, key);
        } else if (key == "tau") {
          tau = value.get<double>();
        } else if (key == "seed") {
          if (!value.is_number_unsigned()) throw Error(ErrorKind::InvalidConfig, "seed must be a non-negative integer");
          seed = value.get<std::uint64_t>();
        } else if (key == "sep") {
          sep_token = value.get<std::string>();
        } else if (key == "dedup_unseen_against_seen") {
          dedup_unseen_against_seen = value.get<bool>();
        } else if (key == "template") {
          instruction_template = value.get<std::string>();
        } else if (key == "category_descriptions") {
          for (const auto& [cat, desc] : value.items()) {
            category_descriptions[parse_category(cat).str()] = desc.get<std::string>();
          }
        } else {
          throw Error(ErrorKind::InvalidConfig, "unknown config key '" + key + "'");
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::InvalidConfig, e.what());
    }
  }

  static ExportConfig from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open config " + path.string());
    ExportConfig cfg;
    try {
      cfg.apply_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::InvalidConfig, e.what());
    }
    return cfg;
  }
};

namespace sampling {

// FNV-1a over the seed bytes and the identifiers, each followed by 0x1f.
inline std::uint64_t pair_seed(std::uint64_t seed, std::string_view image_id, std::string_view object_id,
                               std::string_view category) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(seed >> (8 * i)));
  for (auto part : {image_id, object_id, category}) {
    for (char c : part) mix(static_cast<unsigned char>(c));
    mix(0x1f);
  }
  return h;
}

// Uniform integer in [0, n) by rejection; std::uniform_int_distribution is
// not specified bit-for-bit across standard libraries.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

// `count` distinct indices of [0, n) in draw order (partial Fisher-Yates).
inline std::vector<std::size_t> sample_indices(std::mt19937_64& rng, std::size_t n, std::size_t count) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  count = std::min(count, n);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t pick = i + static_cast<std::size_t>(bounded(rng, n - i));
    std::swap(idx[i], idx[pick]);
  }
  idx.resize(count);
  return idx;
}

}  // namespace sampling

struct InstructionSample {
  std::string image_id;
  std::string object_id;
  CategoryPath category;
  std::string instruction;
  std::string target;

  friend bool operator==(const InstructionSample&, const InstructionSample&) = default;
};

inline std::string render_instruction(const ExportConfig& cfg, const DatasetRecord& record, const GroundedObject& obj,
                                      CategoryPath category) {
  const std::map<std::string_view, std::string> values{
      {"image", record.image_id},
      {"name", obj.name},
      {"x", std::to_string(obj.bbox.x)},
      {"y", std::to_string(obj.bbox.y)},
      {"w", std::to_string(obj.bbox.w)},
      {"h", std::to_string(obj.bbox.h)},
      {"category", cfg.category_descriptions.at(category.str())},
  };
  const std::string& tpl = cfg.instruction_template;
  std::string out;
  for (std::size_t i = 0; i < tpl.size(); ++i) {
    if (tpl[i] == '{') {
      auto close = tpl.find('}', i);
      if (close != std::string::npos) {
        auto it = values.find(std::string_view(tpl).substr(i + 1, close - i - 1));
        if (it != values.end()) {
          out += it->second;
          i = close;
          continue;
        }
      }
    }
    out.push_back(tpl[i]);
  }
  return out;
}

// Target text for one (object, category) group of n tails, given in group order.
inline std::string build_target(const std::vector<std::string>& tails, CategoryPath category,
                                const ExportConfig& cfg, std::mt19937_64& rng) {
  std::vector<std::string> chosen;
  if (category.seen()) {
    for (auto i : sampling::sample_indices(rng, tails.size(), cfg.m)) chosen.push_back(tails[i]);
  } else {
    const std::size_t top = std::min<std::size_t>(cfg.k, tails.size());
    chosen.assign(tails.begin(), tails.begin() + static_cast<std::ptrdiff_t>(top));
    for (auto i : sampling::sample_indices(rng, tails.size() - top, cfg.j)) chosen.push_back(tails[top + i]);
  }
  return text::join(chosen, cfg.sep_token);
}

inline std::vector<InstructionSample> build_instruction_samples(const DatasetRecord& record, const ExportConfig& cfg) {
  std::vector<InstructionSample> out;
  for (const auto& entry : record.objects) {
    for (auto category : CategoryPath::all()) {
      std::vector<std::string> tails;
      for (const auto& t : entry.triples) {
        if (t.category == category) tails.push_back(t.tail);
      }
      if (tails.empty()) continue;
      if (!category.seen() && cfg.k + cfg.j == 0) continue;
      std::mt19937_64 rng(sampling::pair_seed(cfg.seed, record.image_id, entry.object.object_id, category.str()));
      out.push_back({record.image_id, entry.object.object_id, category,
                     render_instruction(cfg, record, entry.object, category), build_target(tails, category, cfg, rng)});
    }
  }
  return out;
}

// One JSON object per line with keys image_id, object_id, category,
// instruction, target, in that order.
inline void write_instruction_samples(const std::vector<InstructionSample>& samples, std::ostream& out) {
  for (const auto& s : samples) {
    nlohmann::ordered_json j;
    j["image_id"] = s.image_id;
    j["object_id"] = s.object_id;
    j["category"] = s.category.str();
    j["instruction"] = s.instruction;
    j["target"] = s.target;
    out << j.dump() << '\n';
  }
}

}  // namespace viscom
