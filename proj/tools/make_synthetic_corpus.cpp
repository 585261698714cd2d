// Writes a deterministic synthetic SCNM corpus whose size and entity counts
// match the Japanese Wikipedia NER dataset: 5,343 sentences, 484 of them
// without entities, 13,185 entities in total.

#include <array>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slg/dataset.hpp"
#include "slg/random.hpp"
#include "slg/schema.hpp"

namespace {

constexpr std::size_t kSentences = 5343;
constexpr std::size_t kNegatives = 484;
constexpr std::size_t kEntities = 13185;

const std::array<std::vector<std::string>, 8> kNames = {{
    {"Shinzo Abe", "Natsume Soseki", "Yukawa Hideki", "Murasaki Shikibu",
     "Oda Nobunaga", "Kurosawa Akira", "Noguchi Hideyo", "Tezuka Osamu"},
    {"Toyota Motor", "Sony Group", "Nintendo", "Hitachi", "Panasonic",
     "Mitsubishi Heavy Industries", "SoftBank", "Kao Corporation"},
    {"Liberal Democratic Party", "Komeito", "House of Councillors",
     "Ministry of Finance", "Cabinet Office", "Japan Innovation Party"},
    {"Japan Football Association", "Red Cross Society", "NHK Symphony",
     "Waseda Rugby Club", "Nippon Foundation", "Kyoto Chamber Choir"},
    {"Japan", "Osaka", "Hokkaido", "Kyoto", "Okinawa", "Nagoya", "Sendai",
     "Fukuoka", "Lake Biwa", "Mount Fuji"},
    {"Tokyo Station", "Narita Airport", "Kansai Airport", "Budokan",
     "Tokyo Dome", "National Diet Library", "Kobe Port Tower"},
    {"Walkman", "Shinkansen", "Famicom", "Cup Noodle", "Prius",
     "Astro Boy", "Pocky"},
    {"Tokyo Olympics", "Expo 70", "Gion Festival", "Meiji Restoration",
     "Sapporo Snow Festival", "Great Kanto Earthquake"},
}};

const std::vector<std::string> kTwoEntityTemplates = {
    "In {Y}, {A} was closely associated with {B}",
    "{A} is often discussed alongside {B} in studies from {Y}",
    "A {Y} survey linked {A} with {B}",
};

const std::vector<std::string> kThreeEntityTemplates = {
    "In {Y}, {A} worked with {B} near {C}",
    "{A} and {B} were both featured at {C} in {Y}",
    "According to a {Y} record, {A} met {B} before visiting {C}",
};

const std::vector<std::string> kNegativeTemplates = {
    "The results of the {Y} experiment were published later",
    "Rainfall during the {Y} season was higher than average",
    "The committee reviewed the proposal again in {Y}",
    "Many readers found the novel difficult to follow",
};

std::string replace_all(std::string text, const std::string& key,
                        const std::string& value) {
  for (auto pos = text.find(key); pos != std::string::npos;
       pos = text.find(key, pos + value.size())) {
    text.replace(pos, key.size(), value);
  }
  return text;
}

template <typename T>
const T& pick(const std::vector<T>& items, std::mt19937_64& rng) {
  return items[slg::uniform_below(rng, items.size())];
}

}  // namespace

int main(int argc, char** argv) {
  const slg::LabelSchema schema = slg::default_schema();
  std::mt19937_64 rng(20230501);

  const std::size_t positives = kSentences - kNegatives;
  const std::size_t three_entity = kEntities - 2 * positives;

  // Entity counts per sentence, shuffled: 0 for negatives, else 2 or 3.
  std::vector<std::size_t> counts(kNegatives, 0);
  counts.insert(counts.end(), three_entity, 3);
  counts.insert(counts.end(), positives - three_entity, 2);
  slg::portable_shuffle(std::span<std::size_t>(counts), rng);

  std::string out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    slg::ScnmRecord record;
    char id[32];
    std::snprintf(id, sizeof id, "scnm-%05zu", i + 1);
    record.id = id;
    record.sc_label = pick(schema.sc_labels, rng);
    const std::string year = std::to_string(1900 + slg::uniform_below(rng, 124));

    std::string sentence;
    if (counts[i] == 0) {
      sentence = pick(kNegativeTemplates, rng);
    } else {
      sentence = counts[i] == 2 ? pick(kTwoEntityTemplates, rng)
                                : pick(kThreeEntityTemplates, rng);
      const char* slots[] = {"{A}", "{B}", "{C}"};
      for (std::size_t k = 0; k < counts[i]; ++k) {
        const std::size_t label = slg::uniform_below(rng, kNames.size());
        const std::string& name = pick(kNames[label], rng);
        sentence = replace_all(sentence, slots[k], name);
        record.entities.push_back({schema.ner_labels[label], name});
      }
    }
    record.sentence = replace_all(sentence, "{Y}", year);
    out += slg::jsonl_row(slg::record_to_json(record));
  }

  if (argc > 1) {
    slg::write_file_atomic(argv[1], out);
  } else {
    std::cout << out;
  }
  return 0;
}
