#include "gasrank/ranking.hpp"

#include <string>

#include "gasrank/error.hpp"

namespace gasrank {

Ranking::Ranking(std::size_t universe_size, std::vector<std::size_t> ordering)
    : universe_size_(universe_size), ordering_(std::move(ordering)) {
  if (universe_size_ == 0) throw InvalidArgument("ranking universe is empty");
  if (ordering_.empty()) throw InvalidArgument("ranking orders no items");
  if (ordering_.size() > universe_size_) {
    throw InvalidArgument("ranking orders more items than the universe holds");
  }
  rank_.assign(universe_size_, 0);
  for (std::size_t pos = 0; pos < ordering_.size(); ++pos) {
    const std::size_t item = ordering_[pos];
    if (item >= universe_size_) {
      throw InvalidArgument("ranking item " + std::to_string(item) +
                            " outside universe of size " + std::to_string(universe_size_));
    }
    if (rank_[item] != 0) {
      throw InvalidArgument("item " + std::to_string(item) + " ranked twice");
    }
    rank_[item] = pos + 1;
  }
  unranked_.reserve(universe_size_ - ordering_.size());
  for (std::size_t i = 0; i < universe_size_; ++i) {
    if (rank_[i] == 0) unranked_.push_back(i);
  }
}

Ranking Ranking::complete(std::vector<std::size_t> ordering) {
  const std::size_t n = ordering.size();
  return Ranking(n, std::move(ordering));
}

std::optional<std::size_t> Ranking::rank_of(std::size_t item) const {
  if (item >= universe_size_ || rank_[item] == 0) return std::nullopt;
  return rank_[item];
}

}  // namespace gasrank
