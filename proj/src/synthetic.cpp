// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#include "spandistill/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

#include "spandistill/hashing.hpp"
#include "spandistill/rng.hpp"
#include "spandistill/text.hpp"

namespace spandistill {
namespace {

const std::vector<std::string> kFirstNames = {
    "Maria", "John",  "Aisha", "Kenji", "Elena", "David",  "Priya",  "Lucas", "Fatima", "Omar",
    "Sofia", "Daniel", "Chen", "Amara", "Ivan",  "Grace",  "Mateo",  "Hannah", "Yusuf", "Laura",
    "Diego", "Nina",  "Samuel", "Leila", "Tomas", "Zara",  "Peter",  "Ines",  "Rafael", "Mei"};
const std::vector<std::string> kLastNames = {
    "Lopez",  "Smith", "Khan",  "Tanaka", "Petrova", "Miller", "Sharma", "Silva",  "Haddad", "Farouk",
    "Rossi",  "Weber", "Wang",  "Okafor", "Novak",   "Kim",    "Garcia", "Becker", "Demir",  "Martin",
    "Alvarez", "Berg", "Mensah", "Rahimi", "Horvat", "Malik",  "Brown",  "Costa",  "Moreau", "Lin"};
const std::vector<std::string> kLocations = {
    "Paris",   "Nairobi",  "Tokyo",   "Lima",         "Cairo",       "Oslo",     "Toronto",
    "Madrid",  "Jakarta",  "Lagos",   "New York",     "Los Angeles", "Buenos Aires",
    "Cape Town", "Hong Kong", "San Diego", "Berlin",  "Mumbai",      "Seoul",    "Dublin",
    "Vienna",  "Chicago",  "Denver",  "Kyoto",        "Accra",       "Quito",    "Hanoi",
    "Manila",  "Athens",   "Prague",  "Rio de Janeiro", "Kuala Lumpur", "Melbourne", "Istanbul",
    "Warsaw",  "Lisbon",   "Bogota",  "Havana",       "Dakar",       "Boston"};
const std::vector<std::string> kOrganizations = {
    "Acme Corporation", "Globex",          "Initech",          "United Nations",
    "World Bank",       "Red Cross",       "Northwind Traders", "Stark Industries",
    "Blue Harbor Bank", "Green Valley Farms", "Apex Labs",     "Orion Airlines",
    "Summit Media",     "Pioneer Energy",  "Harbor Health",    "Nimbus Software",
    "Atlas Motors",     "Crescent University", "Silverline Rail", "Vertex Pharmaceuticals",
    "Sunrise Foods",    "Beacon Press",    "Evergreen Bank",   "Polar Logistics",
    "Riverstone Capital", "Cobalt Mining", "Lumen Telecom",    "Meridian Hospital",
    "Horizon Studios",  "Quartz Robotics"};
const std::vector<std::string> kMonths = {"January", "February", "March",     "April",
                                          "May",     "June",     "July",      "August",
                                          "September", "October", "November", "December"};
const std::vector<std::string> kWeekdays = {"Monday", "Tuesday", "Wednesday", "Thursday",
                                            "Friday", "Saturday", "Sunday"};
const std::vector<std::string> kEvents = {"conference", "festival", "election", "trial",
                                          "merger",     "strike",   "concert",  "marathon",
                                          "summit",     "flood"};
const std::vector<std::string> kTopics = {"climate policy", "public health", "trade",
                                          "education",      "housing",       "energy prices",
                                          "water supply",   "road safety"};
const std::vector<std::string> kNumbers = {"12", "40", "85", "300", "1,200", "4,500", "700"};

enum class Category { Person, Location, Organization, Date, Event, Topic, Count, Unknown };

const std::map<Category, std::vector<std::string>>& label_variants() {
  static const std::map<Category, std::vector<std::string>> kVariants = {
      {Category::Person, {"Person", "Person", "Name", "Individual involved"}},
      {Category::Location, {"Location", "Location", "City", "Place"}},
      {Category::Organization, {"Organization", "Organization", "Company"}},
      {Category::Date, {"Date", "Time period"}},
      {Category::Event, {"Event"}},
      {Category::Topic, {"Topic", "Subject"}},
      {Category::Count, {"Number of people affected", "Number of people"}},
      {Category::Unknown, {"Named entity"}},
  };
  return kVariants;
}

struct GazetteerEntry {
  std::vector<std::string> tokens;
  Category category;
};

const std::vector<GazetteerEntry>& gazetteer() {
  static const std::vector<GazetteerEntry> kEntries = [] {
    std::vector<GazetteerEntry> e;
    for (const auto& f : kFirstNames) {
      for (const auto& l : kLastNames) e.push_back({{f, l}, Category::Person});
    }
    for (const auto& s : kLocations) e.push_back({tokenize(s), Category::Location});
    for (const auto& s : kOrganizations) e.push_back({tokenize(s), Category::Organization});
    for (const auto& s : kTopics) e.push_back({tokenize(s), Category::Topic});
    for (const auto& s : kWeekdays) e.push_back({{s}, Category::Date});
    for (const auto& s : kEvents) e.push_back({{s}, Category::Event});
    // Longest entries first so multi-word names win.
    std::stable_sort(e.begin(), e.end(), [](const auto& a, const auto& b) {
      return a.tokens.size() > b.tokens.size();
    });
    return e;
  }();
  return kEntries;
}

bool is_month(const std::string& t) {
  return std::find(kMonths.begin(), kMonths.end(), t) != kMonths.end();
}
bool is_number(const std::string& t) {
  return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) {
           return std::isdigit(static_cast<unsigned char>(c)) || c == ',';
         }) && std::isdigit(static_cast<unsigned char>(t.front()));
}
bool is_year(const std::string& t) {
  return t.size() == 4 && is_number(t) && (t.starts_with("19") || t.starts_with("20"));
}
bool is_capitalized(const std::string& t) {
  return !t.empty() && std::isupper(static_cast<unsigned char>(t.front()));
}

struct Mention {
  TokenRange range;
  Category category;
};

std::vector<Mention> find_mentions(const std::vector<std::string>& tokens) {
  std::vector<Mention> out;
  std::vector<bool> used(tokens.size(), false);
  auto claim = [&](std::size_t b, std::size_t e, Category c) {
    for (auto k = b; k < e; ++k) used[k] = true;
    out.push_back({{b, e}, c});
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (used[i]) continue;
    if (is_month(tokens[i])) {
      const bool with_day = i + 1 < tokens.size() && is_number(tokens[i + 1]) && !is_year(tokens[i + 1]);
      claim(i, with_day ? i + 2 : i + 1, Category::Date);
      continue;
    }
    if (is_year(tokens[i])) {
      claim(i, i + 1, Category::Date);
      continue;
    }
    if (is_number(tokens[i]) && i + 1 < tokens.size() && tokens[i + 1] == "people") {
      claim(i, i + 1, Category::Count);
      continue;
    }
    for (const auto& entry : gazetteer()) {
      const auto n = entry.tokens.size();
      if (i + n > tokens.size()) continue;
      bool match = true;
      for (std::size_t k = 0; k < n && match; ++k) match = !used[i + k] && tokens[i + k] == entry.tokens[k];
      if (match) {
        claim(i, i + n, entry.category);
        break;
      }
    }
  }
  // Unknown capitalized runs, ignoring the sentence-initial word.
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (used[i] || !is_capitalized(tokens[i])) continue;
    std::size_t j = i;
    while (j < tokens.size() && !used[j] && is_capitalized(tokens[j])) ++j;
    claim(i, j, Category::Unknown);
    i = j;
  }
  std::sort(out.begin(), out.end(),
            [](const Mention& a, const Mention& b) { return a.range < b.range; });
  return out;
}

// Template pieces: literal text and slots such as {PER}.
struct Filled {
  std::string text;
  std::vector<std::string> tokens;
  std::vector<std::pair<std::string, TokenRange>> slots;  // (slot name, range)
};

std::string pick(Rng& rng, const std::vector<std::string>& v) { return v[rng.uniform_index(v.size())]; }

std::string fill_slot(Rng& rng, std::string_view slot) {
  if (slot == "PER") return pick(rng, kFirstNames) + " " + pick(rng, kLastNames);
  if (slot == "LOC") return pick(rng, kLocations);
  if (slot == "ORG") return pick(rng, kOrganizations);
  if (slot == "DATE") {
    switch (rng.uniform_index(3)) {
      case 0:
        return pick(rng, kMonths) + " " + std::to_string(1 + rng.uniform_index(28));
      case 1:
        return pick(rng, kWeekdays);
      default:
        return std::to_string(1995 + rng.uniform_index(30));
    }
  }
  if (slot == "EVENT") return pick(rng, kEvents);
  if (slot == "TOPIC") return pick(rng, kTopics);
  if (slot == "NUM") return pick(rng, kNumbers);
  throw std::logic_error("unknown template slot " + std::string(slot));
}

Filled fill(Rng& rng, std::string_view tmpl) {
  Filled f;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    const auto literal = tmpl.substr(pos, open == std::string_view::npos ? std::string_view::npos : open - pos);
    f.text += literal;
    for (auto& t : tokenize(literal)) f.tokens.push_back(std::move(t));
    if (open == std::string_view::npos) break;
    const auto close = tmpl.find('}', open);
    const auto slot = tmpl.substr(open + 1, close - open - 1);
    const auto value = fill_slot(rng, slot);
    f.text += value;
    const auto begin = f.tokens.size();
    for (auto& t : tokenize(value)) f.tokens.push_back(std::move(t));
    f.slots.push_back({std::string(slot), {begin, f.tokens.size()}});
    pos = close + 1;
  }
  if (f.tokens != tokenize(f.text)) throw std::logic_error("template tokenization drifted: " + f.text);
  return f;
}

const std::vector<std::string_view> kCorpusTemplates = {
    "{PER} visited {LOC} on {DATE}.",
    "{ORG} announced on {DATE} that {PER} will lead its office in {LOC}.",
    "{PER} and {PER} met in {LOC} to discuss {TOPIC}.",
    "More than {NUM} people attended the {EVENT} in {LOC} on {DATE}.",
    "{PER}, a spokesperson for {ORG}, said the {EVENT} was postponed.",
    "The {EVENT} organized by {ORG} drew {NUM} people to {LOC}.",
    "{ORG} hired {PER} after the {EVENT} in {LOC}.",
    "Officials in {LOC} said {NUM} people were affected by the {EVENT}.",
    "{PER} wrote a report on {TOPIC} for {ORG}.",
    "In {DATE}, {ORG} opened a new branch in {LOC}.",
    "{PER} told reporters in {LOC} that {ORG} would invest in {TOPIC}.",
    "On {DATE}, {PER} of {ORG} criticized plans for the {EVENT}.",
};
const std::vector<std::string_view> kFollowUps = {
    "It was the first such meeting this year.", "The details were not disclosed.",
    "Reporters gathered outside the building.", "Further talks are expected soon.",
    "Critics questioned the decision.",         "No other comment was given."};

const std::vector<std::string_view> kNerTemplates = {
    "Yesterday {PER} flew from {LOC} to {LOC}.",
    "According to {ORG}, {PER} now lives in {LOC}.",
    "{PER} has worked for {ORG} since {DATE}.",
    "The new contract between {ORG} and {ORG} was signed in {LOC}.",
    "Fans in {LOC} cheered when {PER} arrived.",
    "{ORG} confirmed that {PER} will retire next year.",
    "Last week {PER} spoke with {PER} about {TOPIC}.",
    "A delegation from {LOC} met {PER} at the offices of {ORG}.",
};

}  // namespace

std::string RuleBasedMockClient::annotate(std::string_view sentence) {
  const auto tokens = tokenize(sentence);
  const auto mentions = find_mentions(tokens);
  const std::uint64_t sentence_hash = fnv1a64(sentence);

  std::vector<std::string> order;
  std::map<std::string, std::vector<std::string>> spans;
  for (const auto& m : mentions) {
    const std::span<const std::string> all(tokens);
    const auto surface = detokenize(all.subspan(m.range.begin, m.range.size()));
    const auto& variants = label_variants().at(m.category);
    const auto& label = variants[fnv1a64(surface, sentence_hash) % variants.size()];
    if (!spans.contains(label)) order.push_back(label);
    spans[label].push_back(surface);
  }

  std::string out;
  if (sentence_hash % 5 == 0) out += "Here is the important information in the sentence:\n";
  for (const auto& label : order) {
    const auto& list = spans[label];
    out += "- " + label + ": ";
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i > 0) out += (i + 1 == list.size() && sentence_hash % 2 == 0) ? " and " : ", ";
      out += list[i];
    }
    out += "\n";
  }
  if (sentence_hash % 7 == 0) out += "- Source: Associated Press\n";
  return out;
}

std::string RuleBasedMockClient::complete(const std::string& prompt) {
  static constexpr std::string_view kMarker = "Sentence: ";
  const auto at = prompt.rfind(kMarker);
  if (at == std::string::npos) return "I could not find a sentence to analyze.";
  auto sentence = std::string_view(prompt).substr(at + kMarker.size());
  if (const auto nl = sentence.find('\n'); nl != std::string_view::npos) sentence = sentence.substr(0, nl);
  return annotate(sentence);
}

std::vector<std::string> synthetic_corpus(std::size_t paragraphs, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> out;
  out.reserve(paragraphs);
  for (std::size_t i = 0; i < paragraphs; ++i) {
    auto first = fill(rng, kCorpusTemplates[rng.uniform_index(kCorpusTemplates.size())]);
    out.push_back(first.text + " " + std::string(kFollowUps[rng.uniform_index(kFollowUps.size())]));
  }
  return out;
}

std::vector<TaskItem> synthetic_ner_items(std::size_t n, std::uint64_t seed,
                                          std::string_view id_prefix) {
  static const std::map<std::string, std::string> kTypes = {
      {"PER", "Person"}, {"LOC", "Location"}, {"ORG", "Organization"}};
  Rng rng(seed);
  std::vector<TaskItem> items;
  for (std::size_t i = 0; i < n; ++i) {
    auto f = fill(rng, kNerTemplates[rng.uniform_index(kNerTemplates.size())]);
    TaskItem item;
    item.id = std::string(id_prefix) + "-" + std::to_string(i);
    item.tokens = std::move(f.tokens);
    for (const auto& [slot, range] : f.slots) {
      const auto it = kTypes.find(slot);
      if (it == kTypes.end()) continue;
      item.gold.push_back({item.id, "entity", {it->second}, {range}});
    }
    std::sort(item.gold.begin(), item.gold.end());
    item.gold.erase(std::unique(item.gold.begin(), item.gold.end()), item.gold.end());
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace spandistill
