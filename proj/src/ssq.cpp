#include "vstbench/ssq.hpp"

#include <stdexcept>
#include <string>

namespace vstbench::study {

void validate_response(const SSQResponse& r) {
  for (int i = 0; i < kSsqItems; ++i)
    if (r[i] < 0 || r[i] > 3)
      throw std::invalid_argument("SSQ item " + std::to_string(i + 1) + " (" + std::string(kSsqItemNames[i]) +
                                  ") rated " + std::to_string(r[i]) + ", expected 0..3");
}

SSQScores ssq_score(const SSQResponse& r, TotalRule rule) {
  validate_response(r);
  int n = 0, o = 0, d = 0, all = 0;
  for (int i = 0; i < kSsqItems; ++i) {
    if (kSsqGroups[i][0]) n += r[i];
    if (kSsqGroups[i][1]) o += r[i];
    if (kSsqGroups[i][2]) d += r[i];
    all += r[i];
  }
  SSQScores s;
  s.nausea = kNauseaWeight * n;
  s.oculomotor = kOculomotorWeight * o;
  s.disorientation = kDisorientationWeight * d;
  s.total = kTotalWeight * (rule == TotalRule::RawSum ? all : n + o + d);
  return s;
}

SSQScores ssq_delta(const SSQScores& pre, const SSQScores& post) {
  return {post.nausea - pre.nausea, post.oculomotor - pre.oculomotor, post.disorientation - pre.disorientation,
          post.total - pre.total};
}

}  // namespace vstbench::study
