#include "msched/fixtures.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "msched/errors.hpp"

namespace msched::fixtures {
namespace {

template <typename S>
ServiceDistribution<S> table(std::initializer_list<std::pair<int, int>> ratios) {
  std::vector<S> h;
  for (auto [num, den] : ratios) h.push_back(scalar_traits<S>::from_ratio(num, den));
  return ServiceDistribution<S>::from_hazards(std::move(h));
}

template <typename S>
ServiceDistribution<S> mix(std::pair<int, int> mu1, std::pair<int, int> mu2) {
  using T = scalar_traits<S>;
  return ServiceDistribution<S>::geometric_mixture(
      {T::from_ratio(1, 2), T::from_ratio(1, 2)},
      {T::from_ratio(mu1.first, mu1.second), T::from_ratio(mu2.first, mu2.second)});
}

// mu(n) = alpha^{n+1} (DHR) or 1 - alpha^{n+1} (IHR) for alpha = a/b
template <typename S>
ServiceDistribution<S> power_dhr(int a, int b) {
  using T = scalar_traits<S>;
  return ServiceDistribution<S>::geom_hazard(T::from_ratio(a, b), S(0), T::from_ratio(a, b));
}
template <typename S>
ServiceDistribution<S> power_ihr(int a, int b) {
  using T = scalar_traits<S>;
  return ServiceDistribution<S>::geom_hazard(S(1) - T::from_ratio(a, b), S(1),
                                             T::from_ratio(a, b));
}

template <typename S>
MultistageJob<S> make_job(const std::string& id) {
  using D = ServiceDistribution<S>;
  auto two = [](D a, D b) { return MultistageJob<S>{{std::move(a), std::move(b)}, S(1)}; };
  if (id == "dhr-dhr-a") return two(power_dhr<S>(1, 2), power_dhr<S>(1, 2));
  if (id == "dhr-dhr-b") return two(mix<S>({4, 5}, {3, 10}), mix<S>({4, 5}, {1, 10}));
  if (id == "dhr-dhr-c") return two(mix<S>({7, 10}, {1, 5}), mix<S>({4, 5}, {1, 10}));
  if (id == "ihr-ihr") return two(power_ihr<S>(1, 2), power_ihr<S>(1, 2));
  if (id == "dhr-ihr") return two(mix<S>({4, 5}, {1, 10}), power_ihr<S>(1, 2));
  if (id == "ihr-dhr-d") return two(power_ihr<S>(1, 2), mix<S>({1, 2}, {1, 10}));
  if (id == "ihr-dhr-e-finite") return two(power_ihr<S>(4, 5), mix<S>({1, 2}, {3, 20}));
  if (id == "ihr-dhr-e-infinite") return two(power_ihr<S>(1, 2), mix<S>({1, 2}, {3, 10}));

  D t1 = table<S>({{1, 2}, {0, 1}, {0, 1}, {1, 1}});
  D t2 = table<S>({{1, 4}, {3, 4}, {0, 1}, {1, 1}});
  D t3 = table<S>({{3, 4}, {1, 4}, {1, 2}, {1, 1}});
  D t5 = table<S>(
      {{0, 1}, {9, 10}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {1, 1}});
  if (id == "k-example-1") return two(t1, t1);
  if (id == "k-example-2") return two(t1, t2);
  if (id == "k-example-3") return MultistageJob<S>{{t1, t1, t1}, S(1)};
  if (id == "k-example-4") return MultistageJob<S>{{t1, t2, t3}, S(1)};
  if (id == "k-example-5") return two(t5, t5);
  throw UnknownFixture("no fixture named '" + id + "'");
}

Fixture make(const std::string& id, const std::string& title, Fixture::Kind kind) {
  Fixture f;
  f.id = id;
  f.title = title;
  f.kind = kind;
  f.job = make_job<double>(id);
  f.golden_file = "golden/" + id + ".csv";
  return f;
}

std::vector<Fixture> build_all() {
  using K = Fixture::Kind;
  std::vector<Fixture> v;
  v.push_back(make("dhr-dhr-a", "Subcase DHR-DHR-A", K::DiscountedTable));
  v.push_back(make("dhr-dhr-b", "Subcase DHR-DHR-B", K::DiscountedTable));
  v.push_back(make("dhr-dhr-c", "Subcase DHR-DHR-C", K::DiscountedTable));
  v.push_back(make("ihr-ihr", "Case IHR-IHR", K::DiscountedTable));
  v.push_back(make("dhr-ihr", "Case DHR-IHR", K::DiscountedTable));
  v.push_back(make("ihr-dhr-d", "Subcase IHR-DHR-D", K::DiscountedTable));
  v.push_back(make("ihr-dhr-e-finite", "Subcase IHR-DHR-E, finite n1*", K::DiscountedTable));
  v.push_back(make("ihr-dhr-e-infinite", "Subcase IHR-DHR-E, infinite n1*", K::DiscountedTable));
  v.push_back(make("k-example-1", "Two identical nonmonotone stages", K::ExactGittins));
  v.push_back(make("k-example-2", "Two distinct nonmonotone stages", K::ExactGittins));
  v.push_back(make("k-example-3", "Three identical nonmonotone stages", K::ExactGittins));
  v.push_back(make("k-example-4", "Three distinct nonmonotone stages", K::ExactGittins));
  v.push_back(make("k-example-5", "Two long nonmonotone stages", K::ExactGittins));
  return v;
}

}  // namespace

const std::vector<Fixture>& all() {
  static const std::vector<Fixture> fixtures = build_all();
  return fixtures;
}

const Fixture& get(const std::string& id) {
  for (const Fixture& f : all())
    if (f.id == id) return f;
  throw UnknownFixture("no fixture named '" + id + "'");
}

MultistageJob<Rational> exact_job(const std::string& id) {
  return make_job<Rational>(id);
}

std::vector<std::string> ids() {
  std::vector<std::string> out;
  for (const Fixture& f : all()) out.push_back(f.id);
  return out;
}

std::string fixture_dir() {
  if (const char* env = std::getenv("MSCHED_FIXTURES")) return env;
  return MSCHED_FIXTURE_DIR;
}

const std::vector<std::string>* Golden::find(const std::string& name) const {
  for (const auto& [key, cells] : rows)
    if (key == name) return &cells;
  return nullptr;
}

Golden load_golden(const Fixture& f) {
  std::string path = fixture_dir() + "/" + f.golden_file;
  std::ifstream in(path);
  if (!in) throw Error("cannot open golden file " + path);
  Golden g;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.empty()) continue;
    std::string key = cells.front();
    cells.erase(cells.begin());
    g.rows.emplace_back(std::move(key), std::move(cells));
  }
  return g;
}

}  // namespace msched::fixtures
