#pragma once

// Dataset records, their line format, corpus statistics and lookup.
//
// Dataset file: one image per line, tab-separated, text fields escaped with
// \\ \t \n \r. Counts announce how many groups follow:
//
//   <image_id> <n_objects>
//     { <object_id> <name> <x> <y> <w> <h> <n_triples>
//         { <category> <tail> <provenance> <score> } * n_triples
//     } * n_objects
//
// Triples of an object are grouped by category in taxonomy order; Seen
// groups are tail-ordered and Unseen groups keep their ranking.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "viscom/error.hpp"
#include "viscom/ingest.hpp"
#include "viscom/lexicon.hpp"
#include "viscom/seen_builder.hpp"
#include "viscom/taxonomy.hpp"
#include "viscom/text.hpp"

namespace viscom {

struct ObjectEntry {
  GroundedObject object;
  std::vector<CommonsenseTriple> triples;

  friend bool operator==(const ObjectEntry&, const ObjectEntry&) = default;
};

struct DatasetRecord {
  std::string image_id;
  std::vector<ObjectEntry> objects;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

// Groups the image's triples under their head objects. Within an object the
// groups follow taxonomy order and the incoming order is kept inside a group.
inline DatasetRecord assemble_record(const Image& image, const std::vector<CommonsenseTriple>& seen,
                                     const std::vector<CommonsenseTriple>& unseen) {
  DatasetRecord record{image.image_id, {}};
  std::map<std::string, std::size_t> slot;
  for (const auto& obj : image.objects) {
    slot.emplace(obj.object_id, record.objects.size());
    record.objects.push_back({obj, {}});
  }
  for (const auto* list : {&seen, &unseen}) {
    for (const auto& t : *list) {
      auto it = slot.find(t.head_id);
      if (it == slot.end()) {
        throw Error(ErrorKind::InvariantViolation, "triple head " + t.head_id + " is not in image " + image.image_id);
      }
      record.objects[it->second].triples.push_back(t);
    }
  }
  for (auto& entry : record.objects) {
    std::stable_sort(entry.triples.begin(), entry.triples.end(),
                     [](const auto& a, const auto& b) { return a.category < b.category; });
  }
  return record;
}

inline void write_record(const DatasetRecord& record, std::ostream& out) {
  using text::escape_field;
  out << escape_field(record.image_id) << '\t' << record.objects.size();
  for (const auto& entry : record.objects) {
    const auto& o = entry.object;
    out << '\t' << escape_field(o.object_id) << '\t' << escape_field(o.name) << '\t' << o.bbox.x << '\t' << o.bbox.y
        << '\t' << o.bbox.w << '\t' << o.bbox.h << '\t' << entry.triples.size();
    for (const auto& t : entry.triples) {
      out << '\t' << t.category.str() << '\t' << escape_field(t.tail) << '\t' << name_of(t.provenance) << '\t'
          << text::format_double(t.score);
    }
  }
  out << '\n';
}

inline void write_dataset(const std::vector<DatasetRecord>& records, std::ostream& out) {
  for (const auto& r : records) write_record(r, out);
}

inline void export_dataset(const std::vector<DatasetRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  write_dataset(records, out);
  out.flush();
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

inline DatasetRecord parse_record(std::string_view line, std::size_t n) {
  auto f = text::split(line, '\t');
  std::size_t at = 0;
  auto next = [&]() -> std::string_view {
    if (at >= f.size()) throw Error(ErrorKind::MalformedRecord, "record ends early", n);
    return f[at++];
  };
  auto next_text = [&]() { return detail::field_text(next(), n); };
  auto next_count = [&]() {
    auto v = text::parse_int<std::uint64_t>(next());
    if (!v) throw Error(ErrorKind::MalformedRecord, "expected a count", n);
    return *v;
  };

  DatasetRecord record;
  record.image_id = next_text();
  auto n_objects = next_count();
  for (std::uint64_t i = 0; i < n_objects; ++i) {
    ObjectEntry entry;
    entry.object.object_id = next_text();
    entry.object.image_id = record.image_id;
    entry.object.name = next_text();
    entry.object.bbox = {detail::field_int(next(), n), detail::field_int(next(), n), detail::field_int(next(), n),
                         detail::field_int(next(), n)};
    if (entry.object.name.empty() || !entry.object.bbox.valid()) {
      throw Error(ErrorKind::MalformedRecord, "invalid object " + entry.object.object_id, n);
    }
    auto n_triples = next_count();
    for (std::uint64_t k = 0; k < n_triples; ++k) {
      CommonsenseTriple t;
      t.head_id = entry.object.object_id;
      t.head_name = entry.object.name;
      try {
        t.category = parse_category(next());
      } catch (const Error& e) {
        throw Error(ErrorKind::MalformedRecord, e.what(), n);
      }
      t.tail = next_text();
      auto prov = provenance_from_name(next());
      auto score = text::parse_double(next());
      if (!prov || !score || text::trim(t.tail).empty()) {
        throw Error(ErrorKind::MalformedRecord, "invalid triple of " + t.head_id, n);
      }
      t.provenance = *prov;
      t.score = *score;
      if ((t.provenance == Provenance::KbRetrieval) == t.category.seen()) {
        throw Error(ErrorKind::MalformedRecord, "provenance does not match category visibility", n);
      }
      entry.triples.push_back(std::move(t));
    }
    record.objects.push_back(std::move(entry));
  }
  if (at != f.size()) throw Error(ErrorKind::MalformedRecord, "trailing fields", n);
  return record;
}

inline std::vector<DatasetRecord> read_dataset(std::istream& in) {
  std::vector<DatasetRecord> records;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    if (!text::is_valid_utf8(line)) throw Error(ErrorKind::MalformedRecord, "invalid UTF-8", n);
    records.push_back(parse_record(line, n));
  }
  return records;
}

inline std::vector<DatasetRecord> import_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  return read_dataset(in);
}

struct Stats {
  std::uint64_t image_count = 0;
  std::uint64_t bbox_count = 0;
  std::uint64_t unique_object_names = 0;
  std::uint64_t total_triples = 0;
  std::map<std::string, std::uint64_t> per_category;  // all eleven category strings

  friend bool operator==(const Stats&, const Stats&) = default;
};

inline Stats compute_stats(const std::vector<DatasetRecord>& records) {
  Stats s;
  std::set<std::string> names;
  std::vector<std::set<std::pair<std::string, std::string>>> distinct(CategoryPath::kCount);
  s.image_count = records.size();
  for (const auto& r : records) {
    for (const auto& entry : r.objects) {
      ++s.bbox_count;
      names.insert(entry.object.name);
      for (const auto& t : entry.triples) {
        ++s.total_triples;
        distinct[t.category.index()].emplace(entry.object.name, t.tail);
      }
    }
  }
  s.unique_object_names = names.size();
  for (auto c : CategoryPath::all()) s.per_category[c.str()] = distinct[c.index()].size();
  return s;
}

inline void write_stats(const Stats& s, std::ostream& out) {
  out << "image_count\t" << s.image_count << '\n'
      << "bbox_count\t" << s.bbox_count << '\n'
      << "unique_object_names\t" << s.unique_object_names << '\n'
      << "total_triples\t" << s.total_triples << '\n';
  for (auto c : CategoryPath::all()) out << c.str() << '\t' << s.per_category.at(c.str()) << '\n';
}

// Triples of objects whose lemmatized name equals the lemmatized query.
inline std::vector<CommonsenseTriple> query(const std::vector<DatasetRecord>& records, std::string_view object_name,
                                            CategoryPath category, const Lexicon& lex) {
  std::vector<CommonsenseTriple> out;
  const std::string wanted = lemmatize(text::normalize_name(object_name), lex);
  if (wanted.empty()) return out;
  for (const auto& r : records) {
    for (const auto& entry : r.objects) {
      if (lemmatize(entry.object.name, lex) != wanted) continue;
      for (const auto& t : entry.triples) {
        if (t.category == category) out.push_back(t);
      }
    }
  }
  return out;
}

}  // namespace viscom
