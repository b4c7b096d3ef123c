#include <cmath>

#include <doctest.h>

#include "pachinko/data_model.hpp"
#include "pachinko/geo.hpp"
#include "pachinko/rng.hpp"

using namespace pachinko;

namespace {
const GeoPoint kSydney{-33.8688, 151.2093};
const GeoPoint kMelbourne{-37.8136, 144.9631};
const GeoPoint kPerth{-31.9505, 115.8605};
}  // namespace

TEST_SUITE("haversine") {
  TEST_CASE("identity") { CHECK(haversine_miles(kSydney, kSydney) == 0.0); }

  TEST_CASE("Sydney to Melbourne matches the independent oracle") {
    const double d = haversine_miles(kSydney, kMelbourne);
    // Frozen from an independent haversine implementation (R = 3958.8 mi,
    // equivalently 713.43 km with R = 6371 km).
    CHECK(d == doctest::Approx(443.3082264440161).epsilon(1e-9));
    CHECK(std::fabs(d - 443.4) < 0.5);
  }

  TEST_CASE("antipodal points reach the analytic great-circle maximum") {
    const double d = haversine_miles({10.0, 20.0}, {-10.0, -160.0});
    CHECK(std::fabs(d - M_PI * kEarthRadiusMiles) < 0.1);
  }

  TEST_CASE("symmetry and triangle inequality on random points") {
    Rng rng(2024);
    for (int i = 0; i < 500; ++i) {
      const auto point = [&] {
        return GeoPoint{rng.uniform() * 180.0 - 90.0, rng.uniform() * 360.0 - 180.0};
      };
      const GeoPoint a = point(), b = point(), c = point();
      CHECK(haversine_miles(a, b) == doctest::Approx(haversine_miles(b, a)).epsilon(1e-12));
      CHECK(haversine_miles(a, b) >= 0.0);
      CHECK(haversine_miles(a, c) <= haversine_miles(a, b) + haversine_miles(b, c) + 1e-9);
    }
  }
}

TEST_SUITE("match_city") {
  const CityGazetteer gaz = default_gazetteer();

  TweetRecord tweet(const std::string& text) {
    TweetRecord t;
    t.id = "t";
    t.text = text;
    t.authored_at = *Timestamp::parse_iso("2018-01-02T09:00:00+11:00");
    return t;
  }

  TEST_CASE("bio location substring") {
    auto t = tweet("nothing here");
    t.bio_location = "Melbourne, Australia";
    const auto m = match_city(t, gaz);
    REQUIRE(m.has_value());
    CHECK(m->city == "Melbourne");
    CHECK(m->criterion == CityMatchCriterion::bio_location);
    CHECK(!m->ambiguous);
  }

  TEST_CASE("geo point inside the 25-mile radius") {
    auto t = tweet("nothing here");
    t.geo = GeoPoint{-31.8059, 115.8605};  // 9.99 miles from the Perth centre
    const auto m = match_city(t, gaz);
    REQUIRE(m.has_value());
    CHECK(m->city == "Perth");
    CHECK(m->criterion == CityMatchCriterion::geo_radius);
    CHECK(haversine_miles(*t.geo, kPerth) == doctest::Approx(9.991006054281765).epsilon(1e-9));
  }

  TEST_CASE("body mention") {
    const auto m = match_city(tweet("rally in sydney tomorrow"), gaz);
    REQUIRE(m.has_value());
    CHECK(m->city == "Sydney");
    CHECK(m->criterion == CityMatchCriterion::body_mention);
  }

  TEST_CASE("no signal, no match") {
    CHECK(!match_city(tweet("nothing to see here"), gaz).has_value());
  }

  TEST_CASE("word boundaries stop prefix matches") {
    auto t = tweet("nothing here");
    t.bio_location = "Perthshire, Scotland";
    CHECK(!match_city(t, gaz).has_value());
    CHECK(!contains_word("perthshire", "perth"));
    CHECK(contains_word("perth!", "perth"));
    CHECK(contains_word("in PERTH today", "perth"));
  }

  TEST_CASE("aliases match on word boundaries") {
    const auto m = match_city(tweet("see you in melb"), gaz);
    REQUIRE(m.has_value());
    CHECK(m->city == "Melbourne");
  }

  TEST_CASE("criterion order: bio beats body mention") {
    auto t = tweet("off to Melbourne");
    t.bio_location = "Sydney";
    const auto m = match_city(t, gaz);
    REQUIRE(m.has_value());
    CHECK(m->city == "Sydney");
    CHECK(m->criterion == CityMatchCriterion::bio_location);
  }

  TEST_CASE("multi-city match takes gazetteer order and flags ambiguity") {
    const auto m = match_city(tweet("Melbourne and Sydney unite"), gaz);
    REQUIRE(m.has_value());
    CHECK(m->city == "Melbourne");  // earlier in gazetteer order
    CHECK(m->ambiguous);
  }
}
