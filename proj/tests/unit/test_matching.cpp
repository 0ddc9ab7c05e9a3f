#include <doctest.h>

#include "senseprobe/errors.hpp"
#include "senseprobe/matching.hpp"

using namespace senseprobe;
using matching::consistent;
using matching::normalize;

namespace {

AnswerClass cls(std::vector<std::string> v) { return AnswerClass::from_variants(v); }

}  // namespace

TEST_SUITE("matching") {

TEST_CASE("normalization") {
  CHECK(normalize("  Berlin. ").value() == "berlin");
  CHECK(normalize("\"Göteborg!\"").value() == "göteborg");
  CHECK(normalize("STRASSE").value() == "strasse");
  CHECK(normalize("...").empty());
  for (const char* s : {" Jean-Luc Crétier ", "«Rabat»", "1,398.", "Ja!"}) {
    const auto once = normalize(s);
    CHECK(normalize(once.value()) == once);
  }
}

TEST_CASE("answer classes") {
  const auto c = cls({"Berlin", "berlin", " Berlino", "", "Berlijn"});
  CHECK(c.members() == std::vector<std::string>{"berlijn", "berlin", "berlino"});
  CHECK(c.contains("berlino"));
  CHECK_FALSE(c.contains("Berlino"));
  CHECK(c.intersects(cls({"berlin", "bonn"})));
  CHECK_THROWS_AS(check_disjoint({c, cls({"bonn", "berlin"})}, "test"), ConfigError);
}

TEST_CASE("incorrect replies naming the same city are consistent") {
  const std::vector<AnswerClass> classes = {cls({"Rabat"}), cls({"Marrakesh", "Marrakesch", "Marrakech"})};
  CHECK(consistent(normalize("Marrakesh"), normalize("Marrakesch"), classes));
  CHECK_FALSE(consistent(normalize("Marrakesh"), normalize("Rabat"), classes));
  CHECK(consistent(normalize("Rabat."), normalize("rabat"), classes));
}

TEST_CASE("answer sets across languages and name variants") {
  const std::vector<AnswerClass> berlin = {cls({"Berlin", "Berlijn", "Berlino"})};
  CHECK(consistent(normalize("Berlijn"), normalize("Berlino"), berlin));
  CHECK_FALSE(consistent(normalize("Berlin"), normalize("Munich"), berlin));

  const std::vector<AnswerClass> paddock = {
      cls({"Charlie Paddock", "Charles Paddock", "Charles William Paddock"})};
  CHECK(consistent(normalize("Charles William Paddock"), normalize("Charlie Paddock"), paddock));
  CHECK_FALSE(consistent(normalize("Charles Paddock"), normalize("Jackson Scholz"), paddock));
}

TEST_CASE("replies outside every class fall back to exact match") {
  const std::vector<AnswerClass> classes = {cls({"1812"})};
  CHECK(consistent(normalize("1813"), normalize("1813."), classes));
  CHECK_FALSE(consistent(normalize("1813"), normalize("1814"), classes));
  CHECK_FALSE(consistent(normalize("1812"), normalize("1813"), classes));
  CHECK(consistent(normalize("Paris"), normalize("paris"), {}));
}

TEST_CASE("overlapping classes are rejected") {
  CHECK_THROWS_AS(consistent(normalize("a"), normalize("a"), {cls({"a", "b"}), cls({"b"})}), ConfigError);
}

TEST_CASE("label mapping") {
  const LabelLexicon en = {{"yes", {"yes"}}, {"no", {"no"}}};
  CHECK(matching::map_label(normalize("Yes."), en) == "yes");
  CHECK(matching::map_label(normalize("No, they differ"), en) == "no");
  CHECK_FALSE(matching::map_label(normalize("yes and no"), en));
  CHECK_FALSE(matching::map_label(normalize("maybe"), en));
  const LabelLexicon it = {{"yes", {"sì", "si"}}, {"no", {"no"}}};
  CHECK(matching::map_label(normalize("Sì"), it) == "yes");
  CHECK(matching::labels_consistent(std::string("yes"), std::string("yes")));
  CHECK_FALSE(matching::labels_consistent(std::nullopt, std::nullopt));
}

TEST_CASE("containment and numeric extraction") {
  const auto paddock = cls({"Charlie Paddock", "Charles Paddock"});
  CHECK(matching::contains_answer("The winner was Charles Paddock.", paddock));
  CHECK_FALSE(matching::contains_answer("Paddock", paddock));
  CHECK(matching::extract_numeric("342 + 122 = 464") == "464");
  CHECK(matching::extract_numeric("464") == "464");
  CHECK(matching::extract_numeric("1,398") == "1398");
  CHECK_FALSE(matching::extract_numeric("about 464"));
  CHECK_FALSE(matching::extract_numeric("= 5"));
}

}
