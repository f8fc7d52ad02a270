#pragma once

#include "boxinfer/analysis.hpp"
#include "boxinfer/errors.hpp"
#include "boxinfer/gaussian.hpp"
#include "boxinfer/log_prob.hpp"
#include "boxinfer/model.hpp"
#include "boxinfer/posterior.hpp"
#include "boxinfer/report.hpp"
#include "boxinfer/sequence.hpp"
#include "boxinfer/sequence_io.hpp"
#include "boxinfer/session.hpp"
