#pragma once

#include <istream>
#include <ostream>
#include <vector>

#include "metroflow/npiv/types.hpp"
#include "metroflow/pipeline/types.hpp"

namespace metroflow::pipeline {

// station,direction,date,time_s,movements
void write_events_csv(const std::vector<ArrivalEvent>& events, std::ostream& out);
[[nodiscard]] std::vector<ArrivalEvent> read_events_csv(std::istream& in);

// station,direction,date,interval,flow,movements,arrivals
void write_observations_csv(const std::vector<IntervalObservation>& obs, std::ostream& out);

// station,direction,date,day,interval,q,n,z  (readable by the estimator's samples reader)
void write_instruments_csv(const std::vector<InstrumentedSample>& samples, std::ostream& out);

[[nodiscard]] std::vector<npiv::NpivSample> to_npiv_samples(const std::vector<InstrumentedSample>& samples);

}  // namespace metroflow::pipeline
