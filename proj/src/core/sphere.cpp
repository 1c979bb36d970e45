#include "nsaudit/sphere.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nsaudit/errors.hpp"

namespace nsaudit {
namespace {

// Generators follow Lebedev's orbit types: a1 = (±1,0,0) perms,
// a2 = (±1,±1,0)/√2 perms, a3 = (±1,±1,±1)/√3, b = (±l,±l,±m) perms.
void add_a1(SphereRule& r, double w) {
  for (int axis = 0; axis < 3; ++axis)
    for (double s : {1.0, -1.0}) {
      Vec3 p{0, 0, 0};
      p[axis] = s;
      r.nodes.push_back(p);
      r.weights.push_back(w);
    }
}

void add_a2(SphereRule& r, double w) {
  const double a = 1.0 / std::sqrt(2.0);
  for (int zero = 0; zero < 3; ++zero)
    for (double s1 : {1.0, -1.0})
      for (double s2 : {1.0, -1.0}) {
        Vec3 p{};
        const int i1 = (zero + 1) % 3, i2 = (zero + 2) % 3;
        p[zero] = 0;
        p[i1] = s1 * a;
        p[i2] = s2 * a;
        r.nodes.push_back(p);
        r.weights.push_back(w);
      }
}

void add_a3(SphereRule& r, double w) {
  const double a = 1.0 / std::sqrt(3.0);
  for (double s1 : {1.0, -1.0})
    for (double s2 : {1.0, -1.0})
      for (double s3 : {1.0, -1.0}) {
        r.nodes.push_back({s1 * a, s2 * a, s3 * a});
        r.weights.push_back(w);
      }
}

void add_b(SphereRule& r, double l, double m, double w) {
  for (int odd = 0; odd < 3; ++odd)
    for (double s1 : {1.0, -1.0})
      for (double s2 : {1.0, -1.0})
        for (double s3 : {1.0, -1.0}) {
          Vec3 p{l, l, l};
          p[odd] = m;
          p[0] *= s1;
          p[1] *= s2;
          p[2] *= s3;
          r.nodes.push_back(p);
          r.weights.push_back(w);
        }
}

}  // namespace

SphereRule lebedev(int points) {
  SphereRule r;
  switch (points) {
    case 6:
      add_a1(r, 1.0 / 6.0);
      break;
    case 14:
      add_a1(r, 1.0 / 15.0);
      add_a3(r, 3.0 / 40.0);
      break;
    case 26:
      add_a1(r, 1.0 / 21.0);
      add_a2(r, 4.0 / 105.0);
      add_a3(r, 9.0 / 280.0);
      break;
    case 50:
      add_a1(r, 4.0 / 315.0);
      add_a2(r, 64.0 / 2835.0);
      add_a3(r, 27.0 / 1280.0);
      add_b(r, 1.0 / std::sqrt(11.0), 3.0 / std::sqrt(11.0), 14641.0 / 725760.0);
      break;
    default:
      throw InvalidInput("no Lebedev rule with " + std::to_string(points) + " points");
  }
  for (double& w : r.weights) w *= 4.0 * std::numbers::pi;
  return r;
}

SphereRule fibonacci_sphere(int points) {
  if (points < 1) throw InvalidInput("fibonacci_sphere needs at least one point");
  SphereRule r;
  r.nodes.reserve(points);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double w = 4.0 * std::numbers::pi / points;
  for (int i = 0; i < points; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / points;
    const double rho = std::sqrt(1.0 - z * z);
    const double phi = golden * i;
    r.nodes.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
    r.weights.push_back(w);
  }
  return r;
}

}  // namespace nsaudit
