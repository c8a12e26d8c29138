#pragma once

#include <span>

#include "uavroute/topology.hpp"

namespace uavroute {

inline constexpr double kLightSpeed = 3.0e8;  // m/s

struct RadioParams {
  double frequency_hz = 2.4e9;
  double tx_power_w = 40.0;
  double noise_power_w = 4e-13;
  double bandwidth_hz = 4e6;
  double light_speed = kLightSpeed;
  int packet_bytes = 512;

  void validate() const;
  double packet_bits() const { return 8.0 * packet_bytes; }
};

// Which endpoint's queue loads hop i -> j.
enum class QueueAttribution { receiver, sender };

struct LinkMetrics {
  double distance = 0.0;   // m
  double path_loss = 0.0;  // dB
  double snr = 0.0;        // linear
  double rate = 0.0;       // bit/s
  double hop_delay = 0.0;  // s
};

double db_to_linear(double db);

// 20 log10(d) + 20 log10(g) - 147.55, d in meters and g in Hz.
double path_loss_db(double distance_m, double frequency_hz);

double snr_linear(double tx_power_w, double path_loss_db, double noise_power_w);
double snr_linear(const RadioParams& params, double path_loss_db);

// Shannon rate B log2(1 + snr).
double rate_bps(double bandwidth_hz, double snr);

// Propagation plus transmission of the queued load: d / c + bits / rate.
double hop_delay(double distance_m, double queued_bits, double rate_bps,
                 double light_speed = kLightSpeed);

// Full chain for one existing link; the queued load is queue_packets whole
// packets. Throws ContractError when i and j are not adjacent.
LinkMetrics link_metrics(const UavNetwork& network, const RadioParams& params, int i, int j,
                         int queue_packets);

// Packets queued on hop `from -> to` under the given attribution.
inline int hop_queue(std::span<const int> queues, int from, int to, QueueAttribution attribution) {
  return queues[static_cast<std::size_t>(attribution == QueueAttribution::receiver ? to : from)];
}

// End-to-end delay: hop delays summed over every consecutive pair of
// `path`, including the hop into the last node. `queues` is indexed by
// node id. Throws ContractError on a broken path.
double path_delay(const UavNetwork& network, const RadioParams& params, std::span<const int> path,
                  std::span<const int> queues,
                  QueueAttribution attribution = QueueAttribution::receiver);

double path_distance(const UavNetwork& network, std::span<const int> path);

}  // namespace uavroute
