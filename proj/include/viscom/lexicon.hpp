#pragma once

// Word lists that drive the rule-based tagger, plus the English morphology
// used for plural and participle de-inflection.
//
// Lexicon directory layout (UTF-8, one entry per line, '#' starts a comment
// line, entries are lowercased on load):
//   determiners.txt            word
//   prepositions.txt           word or multi-word phrase ("in front of")
//   adjectives.txt             word
//   known_nouns.txt            word or compound ("traffic light")
//   verbs.txt                  word[<TAB>lemma]   finite/base verb forms
//   function_words.txt         word               tagged OTHER
//   irregular_participles.txt  word<TAB>lemma     ("hit" -> "hit", "lying" -> "lie")
//   irregular_plurals.txt      word<TAB>lemma     ("men" -> "man")

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "viscom/error.hpp"
#include "viscom/text.hpp"

namespace viscom {

struct Lexicon {
  std::unordered_set<std::string> determiners;
  std::unordered_set<std::string> prepositions;
  std::unordered_set<std::string> adjectives;
  std::unordered_set<std::string> known_nouns;
  std::unordered_map<std::string, std::string> verbs;
  std::unordered_set<std::string> function_words;
  std::unordered_map<std::string, std::string> irregular_participles;
  std::unordered_map<std::string, std::string> irregular_plurals;

  // Word count of the longest multi-word preposition.
  std::size_t max_prep_words = 1;

  bool is_noun(std::string_view w) const { return known_nouns.contains(std::string(w)); }

  void finalize() {
    max_prep_words = 1;
    for (const auto& p : prepositions) {
      max_prep_words = std::max(max_prep_words, text::split_words(p).size());
    }
  }

  static Lexicon load(const std::filesystem::path& dir);
};

namespace detail {

struct LexiconLine {
  std::string word;
  std::string lemma;  // empty when the line has a single column
  std::size_t line_no;
};

inline std::vector<LexiconLine> read_lexicon_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open lexicon file " + path.string());
  std::vector<LexiconLine> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto cols = text::split(body, '\t');
    if (cols.size() > 2) {
      throw Error(ErrorKind::MalformedRecord, path.filename().string() + ": expected word[<TAB>lemma]", line_no);
    }
    LexiconLine entry{text::normalize_name(cols[0]), "", line_no};
    if (cols.size() == 2) entry.lemma = text::normalize_name(cols[1]);
    if (entry.word.empty() || (cols.size() == 2 && entry.lemma.empty())) {
      throw Error(ErrorKind::MalformedRecord, path.filename().string() + ": empty entry", line_no);
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace detail

inline Lexicon Lexicon::load(const std::filesystem::path& dir) {
  Lexicon lex;
  auto load_set = [&](const char* file, std::unordered_set<std::string>& into) {
    for (auto& e : detail::read_lexicon_file(dir / file)) into.insert(std::move(e.word));
  };
  auto load_map = [&](const char* file, std::unordered_map<std::string, std::string>& into, bool lemma_required) {
    for (auto& e : detail::read_lexicon_file(dir / file)) {
      if (e.lemma.empty()) {
        if (lemma_required) {
          throw Error(ErrorKind::MalformedRecord, std::string(file) + ": expected word<TAB>lemma", e.line_no);
        }
        e.lemma = e.word;
      }
      into.emplace(std::move(e.word), std::move(e.lemma));
    }
  };
  load_set("determiners.txt", lex.determiners);
  load_set("prepositions.txt", lex.prepositions);
  load_set("adjectives.txt", lex.adjectives);
  load_set("known_nouns.txt", lex.known_nouns);
  load_map("verbs.txt", lex.verbs, false);
  load_set("function_words.txt", lex.function_words);
  load_map("irregular_participles.txt", lex.irregular_participles, true);
  load_map("irregular_plurals.txt", lex.irregular_plurals, true);
  lex.finalize();
  return lex;
}

namespace morph {

inline bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

inline bool is_consonant(char c) { return c >= 'a' && c <= 'z' && !is_vowel(c); }

inline bool has_vowel(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return is_vowel(c) || c == 'y'; });
}

inline std::size_t vowel_groups(std::string_view s) {
  std::size_t groups = 0;
  bool in_group = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    bool v = is_vowel(s[i]) || (s[i] == 'y' && i > 0);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  return groups;
}

// Restores the base form from a stem left after removing -ing or -ed.
inline std::string restore_verb_stem(std::string stem) {
  const std::size_t n = stem.size();
  if (n >= 3 && stem[n - 1] == stem[n - 2] && is_consonant(stem[n - 1]) &&
      std::string_view("lsfz").find(stem[n - 1]) == std::string_view::npos) {
    stem.pop_back();  // running -> run, stopped -> stop
    return stem;
  }
  char last = stem.back();
  if (last == 'v' || last == 'z' || last == 'c' || last == 'u') return stem + "e";
  // Monosyllabic consonant-vowel-consonant stems that were not doubled lost a
  // silent e: riding -> ride, making -> make, lined -> line.
  if (n >= 2 && vowel_groups(stem) == 1 && is_consonant(last) && is_vowel(stem[n - 2]) &&
      std::string_view("wxy").find(last) == std::string_view::npos &&
      (n == 2 || !is_vowel(stem[n - 3]))) {
    return stem + "e";
  }
  return stem;
}

// Suffix tests used by the tagger before falling back to NOUN.
inline bool looks_like_gerund(std::string_view w) {
  return text::ends_with(w, "ing") && w.size() >= 5 && has_vowel(w.substr(0, w.size() - 3));
}

inline bool looks_like_past_participle(std::string_view w) {
  return text::ends_with(w, "ed") && w.size() >= 5 && has_vowel(w.substr(0, w.size() - 2));
}

inline std::string participle_lemma(std::string_view w, const Lexicon& lex) {
  if (auto it = lex.irregular_participles.find(std::string(w)); it != lex.irregular_participles.end()) {
    return it->second;
  }
  if (looks_like_gerund(w)) return restore_verb_stem(std::string(w.substr(0, w.size() - 3)));
  if (looks_like_past_participle(w)) {
    std::string stem(w.substr(0, w.size() - 2));
    if (stem.back() == 'i') {
      stem.back() = 'y';  // carried -> carry
      return stem;
    }
    if (stem.back() == 'e') return stem;  // agreed -> agree
    return restore_verb_stem(std::move(stem));
  }
  return std::string(w);
}

inline std::string lemmatize_word(std::string_view word, const Lexicon& lex) {
  std::string w(word);
  if (auto it = lex.irregular_plurals.find(w); it != lex.irregular_plurals.end()) return it->second;
  if (lex.is_noun(w) || !text::ends_with(w, "s")) return w;

  std::string strip_s = w.substr(0, w.size() - 1);
  std::string strip_es = w.size() > 2 ? w.substr(0, w.size() - 2) : std::string();
  if (lex.is_noun(strip_s)) return strip_s;
  const std::string_view stem3(w.data(), w.size() - 3);
  // skies -> sky, not the known noun "ski"
  if (text::ends_with(w, "ies") && w.size() > 4) return std::string(stem3) + "y";
  if (!strip_es.empty() && lex.is_noun(strip_es)) return strip_es;
  if (w.size() <= 3 || text::ends_with(w, "ss") || text::ends_with(w, "us") || text::ends_with(w, "is")) {
    return w;
  }

  if (text::ends_with(w, "ves")) {
    std::string f = std::string(stem3) + "f";
    std::string fe = std::string(stem3) + "fe";
    if (lex.is_noun(fe)) return fe;
    return f;
  }
  if (text::ends_with(w, "ches") || text::ends_with(w, "shes") || text::ends_with(w, "xes") ||
      text::ends_with(w, "zes")) {
    return strip_es;
  }
  if (text::ends_with(w, "ses")) {
    // buses -> bus, glasses -> glass, but horses -> horse
    if (text::ends_with(strip_es, "ss") || text::ends_with(strip_es, "us")) return strip_es;
    return strip_s;
  }
  return strip_s;
}

}  // namespace morph

// Lemmatizes an object name; for multi-word names only the last word inflects
// ("traffic lights" -> "traffic light").
inline std::string lemmatize(std::string_view name, const Lexicon& lex) {
  auto words = text::split_words(name);
  if (words.empty()) return {};
  if (words.size() > 1) {
    std::string whole = text::join(words, " ");
    if (auto it = lex.irregular_plurals.find(whole); it != lex.irregular_plurals.end()) return it->second;
    if (lex.is_noun(whole)) return whole;
  }
  words.back() = morph::lemmatize_word(words.back(), lex);
  return text::join(words, " ");
}

}  // namespace viscom
