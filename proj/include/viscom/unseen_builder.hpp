#pragma once

// Unseen commonsense: synsets of object names looked up in the external KB,
// limited to relations with an Unseen leaf, then ranked so tails that mention
// other objects of the same image come first.

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "viscom/ingest.hpp"
#include "viscom/lexicon.hpp"
#include "viscom/phrase_engine.hpp"
#include "viscom/seen_builder.hpp"
#include "viscom/taxonomy.hpp"

namespace viscom {

struct Synset {
  std::string object_id;
  std::vector<std::string> forms;  // surface first, then lemma, then underscore/space variants

  friend bool operator==(const Synset&, const Synset&) = default;
};

inline Synset make_synset(const GroundedObject& object, const Lexicon& lex) {
  Synset s{object.object_id, {}};
  auto add = [&](std::string form) {
    if (!form.empty() && std::find(s.forms.begin(), s.forms.end(), form) == s.forms.end()) {
      s.forms.push_back(std::move(form));
    }
  };
  const std::string surface = text::normalize_name(object.name);
  const std::string lemma = lemmatize(surface, lex);
  add(surface);
  add(lemma);
  for (const auto& base : {surface, lemma}) {
    add(text::replace_all(base, ' ', '_'));
    add(text::replace_all(base, '_', ' '));
  }
  return s;
}

// Unseen leaves in taxonomy order; the relation names double as KB labels.
inline std::vector<CategoryPath> unseen_categories() {
  std::vector<CategoryPath> out;
  for (auto c : CategoryPath::all()) {
    if (!c.seen()) out.push_back(c);
  }
  return out;
}

// KB edges whose head is a synset form and whose relation has an Unseen leaf,
// deduplicated on (category, tail) keeping the first edge found.
inline std::vector<CommonsenseTriple> retrieve_unseen(const GroundedObject& object, const KbIndex& kb,
                                                      const Lexicon& lex) {
  std::vector<CommonsenseTriple> out;
  std::set<std::pair<std::size_t, std::string>> keys;
  const auto synset = make_synset(object, lex);
  const auto categories = unseen_categories();
  for (const auto& form : synset.forms) {
    for (auto category : categories) {
      for (const KbEdge* edge : kb.lookup(form, name_of(category.relation()))) {
        auto mapped = kb_relation_to_category(edge->relation);
        if (!mapped || !keys.emplace(mapped->index(), edge->tail).second) continue;
        out.push_back({object.object_id, object.name, *mapped, edge->tail, Provenance::KbRetrieval, edge->weight});
      }
    }
  }
  return out;
}

// Drops unseen triples whose (relation, tail) equals a seen triple's for the
// same head object.
inline std::vector<CommonsenseTriple> dedup_against_seen(std::vector<CommonsenseTriple> unseen,
                                                         const std::vector<CommonsenseTriple>& seen) {
  std::set<std::tuple<std::string, Relation, std::string>> seen_keys;
  for (const auto& t : seen) seen_keys.emplace(t.head_id, t.category.relation(), t.tail);
  std::erase_if(unseen, [&](const CommonsenseTriple& t) {
    return seen_keys.contains({t.head_id, t.category.relation(), t.tail});
  });
  return unseen;
}

// True when the tail contains, as whole tokens, the lemma of an image object
// other than the head itself ("hit by a car" with a "cars" object).
inline bool mentions_image_object(std::string_view tail, const std::set<std::string>& image_lemmas,
                                  std::string_view head_lemma, const Lexicon& lex) {
  auto tokens = detail::try_tag(tail, lex);
  if (!tokens) return false;
  auto token_matches = [&](const TaggedToken& tok, const std::string& word) {
    return tok.lemma == word || tok.surface == word || morph::lemmatize_word(tok.surface, lex) == word;
  };
  for (const auto& lemma : image_lemmas) {
    if (lemma == head_lemma) continue;
    auto words = text::split_words(lemma);
    if (words.empty() || words.size() > tokens->size()) continue;
    for (std::size_t start = 0; start + words.size() <= tokens->size(); ++start) {
      bool all = true;
      for (std::size_t k = 0; k < words.size() && all; ++k) all = token_matches((*tokens)[start + k], words[k]);
      if (all) return true;
    }
  }
  return false;
}

// Stable sort by (mentions an image object DESC, score DESC, tail ASC); the
// category index breaks the remaining ties so the order is total.
inline std::vector<CommonsenseTriple> object_aware_sort(std::vector<CommonsenseTriple> triples,
                                                        const std::set<std::string>& image_lemmas,
                                                        const Lexicon& lex) {
  std::vector<bool> mentions(triples.size());
  for (std::size_t i = 0; i < triples.size(); ++i) {
    mentions[i] = mentions_image_object(triples[i].tail, image_lemmas, lemmatize(triples[i].head_name, lex), lex);
  }
  std::vector<std::size_t> order(triples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (mentions[a] != mentions[b]) return static_cast<bool>(mentions[a]);
    if (triples[a].score != triples[b].score) return triples[a].score > triples[b].score;
    if (triples[a].tail != triples[b].tail) return triples[a].tail < triples[b].tail;
    return triples[a].category < triples[b].category;
  });
  std::vector<CommonsenseTriple> out;
  out.reserve(triples.size());
  for (auto i : order) out.push_back(std::move(triples[i]));
  return out;
}

inline std::set<std::string> image_lemmas(const Image& image, const Lexicon& lex) {
  std::set<std::string> out;
  for (const auto& o : image.objects) out.insert(lemmatize(o.name, lex));
  return out;
}

struct UnseenOptions {
  bool dedup_against_seen = true;
};

// Unseen triples for every object of the image, grouped by object in image
// order, each group object-aware sorted.
inline std::vector<CommonsenseTriple> build_unseen(const Image& image, const KbIndex& kb, const Lexicon& lex,
                                                   const std::vector<CommonsenseTriple>& seen,
                                                   const UnseenOptions& opts = {}) {
  std::vector<CommonsenseTriple> out;
  const auto lemmas = image_lemmas(image, lex);
  for (const auto& obj : image.objects) {
    auto triples = retrieve_unseen(obj, kb, lex);
    if (opts.dedup_against_seen) triples = dedup_against_seen(std::move(triples), seen);
    triples = object_aware_sort(std::move(triples), lemmas, lex);
    out.insert(out.end(), std::make_move_iterator(triples.begin()), std::make_move_iterator(triples.end()));
  }
  return out;
}

}  // namespace viscom
