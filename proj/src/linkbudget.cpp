#include "uavroute/linkbudget.hpp"

#include <cmath>

#include <fmt/format.h>

#include "uavroute/error.hpp"

namespace uavroute {

void RadioParams::validate() const {
  if (!(frequency_hz > 0.0 && tx_power_w > 0.0 && noise_power_w > 0.0 && bandwidth_hz > 0.0 &&
        light_speed > 0.0 && packet_bytes > 0)) {
    throw ConfigError("radio parameters must all be strictly positive");
  }
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double path_loss_db(double distance_m, double frequency_hz) {
  if (!(distance_m > 0.0) || !(frequency_hz > 0.0)) {
    throw DomainError(
        fmt::format("path loss needs d > 0 and g > 0 (d={}, g={})", distance_m, frequency_hz));
  }
  return 20.0 * std::log10(distance_m) + 20.0 * std::log10(frequency_hz) - 147.55;
}

double snr_linear(double tx_power_w, double path_loss_db, double noise_power_w) {
  if (!(noise_power_w > 0.0)) throw DomainError("noise power must be positive");
  return tx_power_w * db_to_linear(-path_loss_db) / noise_power_w;
}

double snr_linear(const RadioParams& params, double path_loss_db) {
  return snr_linear(params.tx_power_w, path_loss_db, params.noise_power_w);
}

double rate_bps(double bandwidth_hz, double snr) { return bandwidth_hz * std::log2(1.0 + snr); }

double hop_delay(double distance_m, double queued_bits, double rate_bps, double light_speed) {
  if (!(rate_bps > 0.0)) {
    throw DomainError(fmt::format("link rate {} bit/s is unusable", rate_bps));
  }
  if (distance_m < 0.0 || queued_bits < 0.0) throw DomainError("negative distance or load");
  return distance_m / light_speed + queued_bits / rate_bps;
}

LinkMetrics link_metrics(const UavNetwork& network, const RadioParams& params, int i, int j,
                         int queue_packets) {
  if (!network.valid_id(i) || !network.valid_id(j) || !network.adjacent(i, j)) {
    throw ContractError(fmt::format("no link between {} and {}", i, j));
  }
  LinkMetrics m;
  m.distance = network.distance(i, j);
  m.path_loss = path_loss_db(m.distance, params.frequency_hz);
  m.snr = snr_linear(params, m.path_loss);
  m.rate = rate_bps(params.bandwidth_hz, m.snr);
  m.hop_delay = hop_delay(m.distance, queue_packets * params.packet_bits(), m.rate,
                          params.light_speed);
  return m;
}

double path_delay(const UavNetwork& network, const RadioParams& params, std::span<const int> path,
                  std::span<const int> queues, QueueAttribution attribution) {
  if (path.size() < 2) throw ContractError("a path needs at least two nodes");
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const int q = hop_queue(queues, path[k], path[k + 1], attribution);
    total += link_metrics(network, params, path[k], path[k + 1], q).hop_delay;
  }
  return total;
}

double path_distance(const UavNetwork& network, std::span<const int> path) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) total += network.distance(path[k], path[k + 1]);
  return total;
}

}  // namespace uavroute
