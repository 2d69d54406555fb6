#pragma once

// Scene-graph corpus and commonsense KB loading.
//
// Scene corpus: UTF-8, one record per line, tab-separated, first field is the
// record type. Blank lines and lines starting with '#' are skipped. Text
// fields use the dataset escaping (\\, \t, \n, \r).
//
//   I  <image_id>  [<width>  <height>]
//   O  <object_id> <image_id> <name> <x> <y> <w> <h>
//   T  <image_id>  <subject_id> A <predicate> <attribute text>
//   T  <image_id>  <subject_id> R <predicate> <object_id>
//   R  <image_id>  <phrase> <x> <y> <w> <h>
//
// Records may appear in any order; references are checked once the whole
// input has been read. A directory path loads every regular file in it in
// name order.
//
// KB file: <head> <TAB> <relation> <TAB> <tail> [<TAB> <weight>]. ConceptNet
// style URIs ("/c/en/traffic_light/n", "/r/UsedFor") are reduced to their
// term and label.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "viscom/error.hpp"
#include "viscom/text.hpp"

namespace viscom {

struct BBox {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t w = 1;
  std::int64_t h = 1;

  std::int64_t area() const { return w * h; }
  bool valid() const { return w > 0 && h > 0 && x >= 0 && y >= 0; }
  bool fits(std::int64_t width, std::int64_t height) const { return x + w <= width && y + h <= height; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct GroundedObject {
  std::string object_id;
  std::string image_id;
  std::string name;  // lowercase, single-spaced
  BBox bbox;

  friend bool operator==(const GroundedObject&, const GroundedObject&) = default;
};

enum class TripleKind { Attribute, Relationship };

struct SceneTriple {
  std::string image_id;
  std::string subject_id;
  std::string predicate;
  std::string object_slot;  // attribute text, or an object_id for relationships
  TripleKind kind = TripleKind::Attribute;

  friend bool operator==(const SceneTriple&, const SceneTriple&) = default;
};

struct Region {
  std::string image_id;
  std::string phrase;
  BBox bbox;

  friend bool operator==(const Region&, const Region&) = default;
};

struct Image {
  std::string image_id;
  std::optional<std::int64_t> width;
  std::optional<std::int64_t> height;
  std::vector<GroundedObject> objects;
  std::vector<SceneTriple> triples;
  std::vector<Region> regions;

  const GroundedObject* find_object(std::string_view object_id) const {
    for (const auto& o : objects) {
      if (o.object_id == object_id) return &o;
    }
    return nullptr;
  }

  friend bool operator==(const Image&, const Image&) = default;
};

class SceneCorpus {
 public:
  SceneCorpus() = default;

  const std::vector<Image>& images() const { return images_; }
  std::size_t image_count() const { return images_.size(); }
  std::size_t bbox_count() const { return bbox_count_; }

  const Image* find_image(std::string_view image_id) const {
    auto it = image_index_.find(std::string(image_id));
    return it == image_index_.end() ? nullptr : &images_[it->second];
  }

  const GroundedObject* find_object(std::string_view object_id) const {
    auto it = object_index_.find(std::string(object_id));
    if (it == object_index_.end()) return nullptr;
    return &images_[it->second.first].objects[it->second.second];
  }

  friend SceneCorpus load_scene_corpus(const std::filesystem::path& path);
  friend class SceneCorpusBuilder;

 private:
  std::vector<Image> images_;
  std::unordered_map<std::string, std::size_t> image_index_;
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> object_index_;
  std::size_t bbox_count_ = 0;
};

// Assembles a SceneCorpus from records in any order and validates it. Used by
// the file loader and by tests that construct corpora in memory.
class SceneCorpusBuilder {
 public:
  void add_image(std::string image_id, std::optional<std::int64_t> width = std::nullopt,
                 std::optional<std::int64_t> height = std::nullopt, std::size_t line = 0) {
    if (image_id.empty()) throw Error(ErrorKind::MalformedRecord, "empty image_id", line);
    if (width && (*width <= 0 || !height || *height <= 0)) {
      throw Error(ErrorKind::MalformedRecord, "image dimensions must be positive", line);
    }
    if (!image_pos_.emplace(image_id, images_.size()).second) {
      throw Error(ErrorKind::MalformedRecord, "duplicate image_id " + image_id, line);
    }
    Image img;
    img.image_id = std::move(image_id);
    img.width = width;
    img.height = height;
    images_.push_back(std::move(img));
  }

  void add_object(GroundedObject obj, std::size_t line = 0) {
    obj.name = text::normalize_name(obj.name);
    if (obj.object_id.empty()) throw Error(ErrorKind::MalformedRecord, "empty object_id", line);
    if (obj.name.empty()) throw Error(ErrorKind::MalformedRecord, "empty object name", line);
    if (!obj.bbox.valid()) throw Error(ErrorKind::MalformedRecord, "invalid bounding box", line);
    if (!object_ids_.emplace(obj.object_id, line).second) {
      throw Error(ErrorKind::MalformedRecord, "duplicate object_id " + obj.object_id, line);
    }
    objects_.push_back({std::move(obj), line});
  }

  void add_triple(SceneTriple t, std::size_t line = 0) {
    if (t.kind == TripleKind::Attribute) t.object_slot = text::normalize_name(t.object_slot);
    t.predicate = text::normalize_name(t.predicate);
    if (t.object_slot.empty()) throw Error(ErrorKind::MalformedRecord, "empty triple object", line);
    triples_.push_back({std::move(t), line});
  }

  void add_region(Region r, std::size_t line = 0) {
    if (text::trim(r.phrase).empty()) throw Error(ErrorKind::MalformedRecord, "empty region phrase", line);
    if (!r.bbox.valid()) throw Error(ErrorKind::MalformedRecord, "invalid bounding box", line);
    regions_.push_back({std::move(r), line});
  }

  SceneCorpus build() && {
    if (images_.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus has no images");
    SceneCorpus corpus;
    corpus.images_ = std::move(images_);
    corpus.image_index_ = std::move(image_pos_);
    auto image_for = [&](const std::string& id, std::size_t line) -> Image& {
      auto it = corpus.image_index_.find(id);
      if (it == corpus.image_index_.end()) {
        throw Error(ErrorKind::DanglingReference, "unknown image_id " + id, line);
      }
      return corpus.images_[it->second];
    };
    for (auto& [obj, line] : objects_) {
      Image& img = image_for(obj.image_id, line);
      if (img.width && !obj.bbox.fits(*img.width, *img.height)) {
        throw Error(ErrorKind::MalformedRecord, "box of " + obj.object_id + " exceeds image bounds", line);
      }
      std::size_t image_pos = corpus.image_index_.at(obj.image_id);
      corpus.object_index_.emplace(obj.object_id, std::pair{image_pos, img.objects.size()});
      img.objects.push_back(std::move(obj));
      ++corpus.bbox_count_;
    }
    for (auto& [t, line] : triples_) {
      Image& img = image_for(t.image_id, line);
      auto in_image = [&](const std::string& object_id) {
        auto it = corpus.object_index_.find(object_id);
        return it != corpus.object_index_.end() && corpus.images_[it->second.first].image_id == t.image_id;
      };
      if (!in_image(t.subject_id)) {
        throw Error(ErrorKind::DanglingReference, "subject " + t.subject_id + " not in image " + t.image_id, line);
      }
      if (t.kind == TripleKind::Relationship && !in_image(t.object_slot)) {
        throw Error(ErrorKind::DanglingReference, "object " + t.object_slot + " not in image " + t.image_id, line);
      }
      img.triples.push_back(std::move(t));
    }
    for (auto& [r, line] : regions_) {
      Image& img = image_for(r.image_id, line);
      if (img.width && !r.bbox.fits(*img.width, *img.height)) {
        throw Error(ErrorKind::MalformedRecord, "region box exceeds image bounds", line);
      }
      img.regions.push_back(std::move(r));
    }
    return corpus;
  }

 private:
  template <typename T>
  struct Lined {
    T value;
    std::size_t line;
  };

  std::vector<Image> images_;
  std::unordered_map<std::string, std::size_t> image_pos_;
  std::unordered_map<std::string, std::size_t> object_ids_;
  std::vector<Lined<GroundedObject>> objects_;
  std::vector<Lined<SceneTriple>> triples_;
  std::vector<Lined<Region>> regions_;
};

namespace detail {

inline std::vector<std::filesystem::path> input_files(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
  }
  if (!fs::exists(path, ec)) throw Error(ErrorKind::IoFailure, "no such file or directory: " + path.string());
  return {path};
}

// Streams the non-comment lines of every input file; `line` counts across files.
template <typename Fn>
void for_each_record_line(const std::filesystem::path& path, Fn&& fn) {
  std::size_t line_no = 0;
  for (const auto& file : input_files(path)) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + file.string());
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (text::trim(line).empty() || line.front() == '#') continue;
      if (!text::is_valid_utf8(line)) throw Error(ErrorKind::MalformedRecord, "invalid UTF-8", line_no);
      fn(std::string_view(line), line_no);
    }
  }
}

inline std::string field_text(std::string_view raw, std::size_t line) {
  auto value = text::unescape_field(raw);
  if (!value) throw Error(ErrorKind::MalformedRecord, "bad escape sequence", line);
  return *value;
}

inline std::int64_t field_int(std::string_view raw, std::size_t line) {
  auto value = text::parse_int<std::int64_t>(raw);
  if (!value) throw Error(ErrorKind::MalformedRecord, "expected integer, got '" + std::string(raw) + "'", line);
  return *value;
}

inline BBox field_box(const std::vector<std::string_view>& f, std::size_t at, std::size_t line) {
  return BBox{field_int(f[at], line), field_int(f[at + 1], line), field_int(f[at + 2], line),
              field_int(f[at + 3], line)};
}

}  // namespace detail

inline SceneCorpus load_scene_corpus(const std::filesystem::path& path) {
  SceneCorpusBuilder builder;
  detail::for_each_record_line(path, [&](std::string_view line, std::size_t n) {
    auto f = text::split(line, '\t');
    auto expect = [&](std::size_t count) {
      if (f.size() != count) {
        throw Error(ErrorKind::MalformedRecord,
                    "record '" + std::string(f[0]) + "' expects " + std::to_string(count) + " fields, got " +
                        std::to_string(f.size()),
                    n);
      }
    };
    if (f[0] == "I") {
      if (f.size() == 2) {
        builder.add_image(detail::field_text(f[1], n), std::nullopt, std::nullopt, n);
      } else {
        expect(4);
        builder.add_image(detail::field_text(f[1], n), detail::field_int(f[2], n), detail::field_int(f[3], n), n);
      }
    } else if (f[0] == "O") {
      expect(8);
      builder.add_object({detail::field_text(f[1], n), detail::field_text(f[2], n), detail::field_text(f[3], n),
                          detail::field_box(f, 4, n)},
                         n);
    } else if (f[0] == "T") {
      expect(6);
      TripleKind kind;
      if (f[3] == "A") {
        kind = TripleKind::Attribute;
      } else if (f[3] == "R") {
        kind = TripleKind::Relationship;
      } else {
        throw Error(ErrorKind::MalformedRecord, "triple kind must be A or R", n);
      }
      builder.add_triple({detail::field_text(f[1], n), detail::field_text(f[2], n), detail::field_text(f[4], n),
                          detail::field_text(f[5], n), kind},
                         n);
    } else if (f[0] == "R") {
      expect(7);
      builder.add_region({detail::field_text(f[1], n), detail::field_text(f[2], n), detail::field_box(f, 3, n)}, n);
    } else {
      throw Error(ErrorKind::MalformedRecord, "unknown record type '" + std::string(f[0]) + "'", n);
    }
  });
  return std::move(builder).build();
}

// Writes the corpus back in the record format, image by image.
inline void write_scene_corpus(const SceneCorpus& corpus, std::ostream& out) {
  using text::escape_field;
  auto box = [](const BBox& b) {
    return std::to_string(b.x) + "\t" + std::to_string(b.y) + "\t" + std::to_string(b.w) + "\t" + std::to_string(b.h);
  };
  for (const auto& img : corpus.images()) {
    out << "I\t" << escape_field(img.image_id);
    if (img.width) out << '\t' << *img.width << '\t' << *img.height;
    out << '\n';
    for (const auto& o : img.objects) {
      out << "O\t" << escape_field(o.object_id) << '\t' << escape_field(o.image_id) << '\t' << escape_field(o.name)
          << '\t' << box(o.bbox) << '\n';
    }
    for (const auto& t : img.triples) {
      out << "T\t" << escape_field(t.image_id) << '\t' << escape_field(t.subject_id) << '\t'
          << (t.kind == TripleKind::Attribute ? "A" : "R") << '\t' << escape_field(t.predicate) << '\t'
          << escape_field(t.object_slot) << '\n';
    }
    for (const auto& r : img.regions) {
      out << "R\t" << escape_field(r.image_id) << '\t' << escape_field(r.phrase) << '\t' << box(r.bbox) << '\n';
    }
  }
}

struct KbEdge {
  std::string head;
  std::string relation;
  std::string tail;
  double weight = 1.0;

  friend bool operator==(const KbEdge&, const KbEdge&) = default;
};

// Strips ConceptNet URI decoration and normalizes a KB term: lowercase,
// underscores to spaces, single-spaced.
inline std::string normalize_kb_term(std::string_view raw) {
  raw = text::trim(raw);
  if (raw.starts_with("/c/")) {
    auto parts = text::split(raw.substr(3), '/');
    raw = parts.size() >= 2 ? parts[1] : std::string_view();
  }
  return text::normalize_name(text::replace_all(raw, '_', ' '));
}

inline std::string normalize_kb_relation(std::string_view raw) {
  raw = text::trim(raw);
  if (raw.starts_with("/r/")) raw.remove_prefix(3);
  return std::string(raw);
}

class KbIndex {
 public:
  KbIndex() = default;
  explicit KbIndex(std::vector<KbEdge> edges) : edges_(std::move(edges)) {
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      by_head_[edges_[i].head][edges_[i].relation].push_back(i);
    }
  }

  std::size_t size() const { return edges_.size(); }
  const std::vector<KbEdge>& edges() const { return edges_; }

  // Edges with this head and relation, in file order. The head is normalized
  // like KB terms, so "traffic_light" and "traffic light" agree.
  std::vector<const KbEdge*> lookup(std::string_view head, std::string_view relation) const {
    std::vector<const KbEdge*> out;
    auto h = by_head_.find(normalize_kb_term(head));
    if (h == by_head_.end()) return out;
    auto r = h->second.find(std::string(relation));
    if (r == h->second.end()) return out;
    for (auto i : r->second) out.push_back(&edges_[i]);
    return out;
  }

  std::vector<const KbEdge*> lookup(std::string_view head, std::initializer_list<std::string_view> relations) const {
    std::vector<const KbEdge*> out;
    for (auto rel : relations) {
      auto part = lookup(head, rel);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }

 private:
  std::vector<KbEdge> edges_;
  // head -> relation -> edge positions; std::map keeps relation iteration ordered.
  std::unordered_map<std::string, std::map<std::string, std::vector<std::size_t>>> by_head_;
};

inline KbEdge parse_kb_line(std::string_view line, std::size_t n) {
  auto f = text::split(line, '\t');
  if (f.size() < 3 || f.size() > 4) {
    throw Error(ErrorKind::MalformedRecord, "KB row needs head, relation, tail and optional weight", n);
  }
  KbEdge edge{normalize_kb_term(f[0]), normalize_kb_relation(f[1]),
              text::normalize_name(text::replace_all(detail::field_text(f[2], n), '_', ' ')), 1.0};
  if (f[2].starts_with("/c/")) edge.tail = normalize_kb_term(f[2]);
  if (f.size() == 4 && !text::trim(f[3]).empty()) {
    auto w = text::parse_double(f[3]);
    if (!w || !(*w >= 0.0)) throw Error(ErrorKind::MalformedRecord, "weight must be a non-negative number", n);
    edge.weight = *w;
  }
  if (edge.head.empty() || edge.tail.empty() || edge.relation.empty()) {
    throw Error(ErrorKind::MalformedRecord, "empty head, relation or tail", n);
  }
  return edge;
}

inline KbIndex load_kb(const std::filesystem::path& path) {
  std::vector<KbEdge> edges;
  detail::for_each_record_line(path, [&](std::string_view line, std::size_t n) { edges.push_back(parse_kb_line(line, n)); });
  if (edges.empty()) throw Error(ErrorKind::EmptyKb, "KB has no edges");
  return KbIndex(std::move(edges));
}

}  // namespace viscom
