#include "mstress/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mstress {

namespace {

bool is_word_char(unsigned char c) {
  // Non-ASCII bytes are treated as word characters so UTF-8 sequences stay
  // inside one token.
  return std::isalnum(c) || c >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else if (is_word_char(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
      tokens.push_back(std::string(1, static_cast<char>(c)));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

void validate_dialogue(const Dialogue& dialogue) {
  if (dialogue.turns.size() < 2) {
    throw ValidationError("dialogue '" + dialogue.dialogue_id +
                          "' has fewer than 2 turns");
  }
  std::set<int> speakers;
  for (std::size_t i = 0; i < dialogue.turns.size(); ++i) {
    const Turn& turn = dialogue.turns[i];
    speakers.insert(turn.speaker);
    if (turn.text.empty() || tokenize(turn.text).empty()) {
      throw ValidationError("dialogue '" + dialogue.dialogue_id + "' turn " +
                            std::to_string(i) + " has empty text");
    }
    if (i > 0 && turn.speaker == dialogue.turns[i - 1].speaker) {
      throw ValidationError("dialogue '" + dialogue.dialogue_id +
                            "' speakers do not alternate at turn " +
                            std::to_string(i));
    }
  }
  if (speakers.size() != 2) {
    throw ValidationError("dialogue '" + dialogue.dialogue_id + "' has " +
                          std::to_string(speakers.size()) +
                          " speaker ids, expected exactly 2");
  }
}

Vocabulary::Vocabulary() {
  add_surface("<pad>");
  add_surface("<bos>");
  add_surface("<eos>");
  add_surface("<unk>");
}

void Vocabulary::add_surface(std::string token) {
  ids_.emplace(token, static_cast<TokenId>(surfaces_.size()));
  surfaces_.push_back(std::move(token));
}

Vocabulary Vocabulary::build(const std::vector<Dialogue>& dialogues,
                             std::size_t max_types) {
  std::map<std::string, std::size_t> counts;
  for (const Dialogue& d : dialogues) {
    for (const Turn& t : d.turns) {
      for (auto& tok : tokenize(t.text)) ++counts[tok];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ordered(counts.begin(),
                                                           counts.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary vocab;
  for (const auto& [token, count] : ordered) {
    if (vocab.surfaces_.size() - kNumReserved >= max_types) break;
    (void)count;
    vocab.add_surface(token);
  }
  return vocab;
}

TokenId Vocabulary::id_of(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::surface(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= surfaces_.size()) {
    throw ValidationError("token id " + std::to_string(id) +
                          " outside vocabulary of size " +
                          std::to_string(surfaces_.size()));
  }
  return surfaces_[static_cast<std::size_t>(id)];
}

Tokens Vocabulary::encode(const std::vector<std::string>& tokens) const {
  Tokens ids;
  ids.reserve(tokens.size());
  for (const auto& tok : tokens) ids.push_back(id_of(tok));
  return ids;
}

Tokens Vocabulary::encode_text(std::string_view text) const {
  return encode(tokenize(text));
}

std::vector<std::string> Vocabulary::decode(const Tokens& ids) const {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (TokenId id : ids) tokens.push_back(surface(id));
  return tokens;
}

std::string Vocabulary::render(const Tokens& ids) const {
  std::string out;
  for (TokenId id : ids) {
    if (is_reserved(id) && id != kUnk) continue;
    if (!out.empty()) out.push_back(' ');
    out += surface(id);
  }
  return out;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& s : surfaces_) {
    mix(s.data(), s.size());
    mix("\n", 1);
  }
  return h;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (std::size_t i = kNumReserved; i < surfaces_.size(); ++i) {
    out << surfaces_[i] << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Vocabulary vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    vocab.add_surface(line);
  }
  return vocab;
}

std::vector<Dialogue> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  std::vector<Dialogue> dialogues;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": invalid JSON: " + e.what());
    }
    if (!obj.is_object() || !obj.contains("dialogue_id") ||
        !obj.contains("turns") || !obj["turns"].is_array()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected {\"dialogue_id\", \"turns\": [...]}");
    }
    Dialogue d;
    try {
      d.dialogue_id = obj["dialogue_id"].get<std::string>();
      for (const auto& jt : obj["turns"]) {
        Turn turn;
        turn.speaker = jt.at("speaker").get<int>();
        turn.text = jt.at("text").get<std::string>();
        d.turns.push_back(std::move(turn));
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": bad turn record: " + e.what());
    }
    validate_dialogue(d);
    dialogues.push_back(std::move(d));
  }
  return dialogues;
}

void save_corpus(const std::filesystem::path& path,
                 const std::vector<Dialogue>& dialogues) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const Dialogue& d : dialogues) {
    nlohmann::json turns = nlohmann::json::array();
    for (const Turn& t : d.turns) {
      turns.push_back({{"speaker", t.speaker}, {"text", t.text}});
    }
    nlohmann::json obj{{"dialogue_id", d.dialogue_id}, {"turns", turns}};
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<ContextResponsePair> make_pairs(
    const std::vector<Dialogue>& dialogues, const Vocabulary& vocab,
    int context_window) {
  if (context_window < 1) {
    throw ValidationError("context_window must be >= 1");
  }
  std::vector<ContextResponsePair> pairs;
  for (const Dialogue& d : dialogues) {
    std::vector<Tokens> encoded;
    encoded.reserve(d.turns.size());
    for (const Turn& t : d.turns) encoded.push_back(vocab.encode_text(t.text));
    for (std::size_t t = 1; t < encoded.size(); ++t) {
      ContextResponsePair pair;
      const std::size_t window = std::min<std::size_t>(t, context_window);
      pair.context.assign(encoded.begin() + (t - window), encoded.begin() + t);
      pair.response = encoded[t];
      pair.gold = true;
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

std::vector<ContrastTriple> negative_sample(
    const std::vector<ContextResponsePair>& pairs, Rng& rng) {
  if (pairs.size() < 2) {
    throw ValidationError("negative sampling needs at least 2 pairs");
  }
  std::vector<ContrastTriple> triples;
  triples.reserve(pairs.size());
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    candidates.clear();
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      if (j != i && pairs[j].response != pairs[i].response) {
        candidates.push_back(j);
      }
    }
    if (candidates.empty()) {
      throw ValidationError(
          "no negative available for pair " + std::to_string(i) +
          ": every other response has identical content");
    }
    const std::size_t j = candidates[rng.index(candidates.size())];
    triples.push_back({pairs[i].context, pairs[i].response, pairs[j].response});
  }
  return triples;
}

namespace {

struct ExchangeTemplate {
  const char* prompt;
  const char* reply;
  bool has_noun;
};

constexpr const char* kNouns[] = {
    "music",    "soccer",  "tennis",   "painting",  "cooking",  "chess",
    "hiking",   "novels",  "movies",   "gardening", "jazz",     "photography",
    "baseball", "poetry",  "dancing",  "fishing",   "skiing",   "yoga",
    "history",  "travel",  "coffee",   "tea",       "cats",     "dogs",
    "birds",    "guitars", "pianos",   "drums",     "puzzles",  "comics",
    "robots",   "sailing", "running",  "baking",    "climbing", "astronomy",
};

constexpr ExchangeTemplate kOpeners[] = {
    {"hello , how are you today ?", "i am doing well , thanks for asking .", false},
    {"hi there , how is your day going ?", "pretty good , thank you for asking .", false},
    {"good morning , did you sleep well ?", "yes , i slept very well last night .", false},
    {"hey , nice to see you again .", "nice to see you too , my friend .", false},
};

constexpr ExchangeTemplate kTopics[] = {
    {"do you like {noun} ?", "yes , i like {noun} very much .", true},
    {"what do you think about {noun} ?", "i think {noun} is really interesting .", true},
    {"have you tried {noun} recently ?", "i tried {noun} last weekend and enjoyed it .", true},
    {"how often do you practice {noun} ?", "i practice {noun} almost every day .", true},
    {"is {noun} a big part of your life ?", "yes , {noun} is a big part of my life .", true},
    {"would you recommend {noun} to a beginner ?", "i would recommend {noun} to anyone .", true},
};

constexpr ExchangeTemplate kClosers[] = {
    {"i had a rough day at work today .", "i am sorry to hear that , i hope tomorrow is better .", false},
    {"my {noun} lesson was cancelled this week .", "that is a shame , i hope the lesson happens soon .", true},
    {"i am feeling a little tired now .", "you should get some rest tonight .", false},
    {"it was lovely talking with you .", "likewise , let us talk again soon .", false},
};

std::string fill_noun(std::string text, const std::string& noun) {
  const std::string slot = "{noun}";
  std::size_t pos;
  while ((pos = text.find(slot)) != std::string::npos) {
    text.replace(pos, slot.size(), noun);
  }
  return text;
}

}  // namespace

std::vector<Dialogue> generate_synthetic_corpus(std::uint64_t seed,
                                                std::size_t n_dialogues) {
  if (n_dialogues < 1) {
    throw ValidationError("n_dialogues must be >= 1");
  }
  Rng rng(seed, /*stream=*/0x5e);
  std::vector<Dialogue> dialogues;
  dialogues.reserve(n_dialogues);
  constexpr std::size_t n_nouns = std::size(kNouns);
  for (std::size_t i = 0; i < n_dialogues; ++i) {
    Dialogue d;
    char id[32];
    std::snprintf(id, sizeof(id), "dlg-%06zu", i);
    d.dialogue_id = id;
    int speaker = 0;
    auto push_exchange = [&](const ExchangeTemplate& ex) {
      const std::string noun =
          ex.has_noun ? kNouns[rng.index(n_nouns)] : std::string();
      d.turns.push_back({speaker, fill_noun(ex.prompt, noun)});
      d.turns.push_back({1 - speaker, fill_noun(ex.reply, noun)});
      // Alternation is preserved across exchanges: the next prompt comes
      // from the speaker who just replied's partner.
    };
    push_exchange(kOpeners[rng.index(std::size(kOpeners))]);
    const std::size_t n_topics = 1 + rng.index(2);
    for (std::size_t t = 0; t < n_topics; ++t) {
      push_exchange(kTopics[rng.index(std::size(kTopics))]);
    }
    if (rng.bernoulli(0.5)) {
      push_exchange(kClosers[rng.index(std::size(kClosers))]);
    }
    validate_dialogue(d);
    dialogues.push_back(std::move(d));
  }
  return dialogues;
}

}  // namespace mstress
