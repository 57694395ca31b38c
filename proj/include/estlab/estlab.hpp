// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "estlab/analysis.hpp"
#include "estlab/channel.hpp"
#include "estlab/config.hpp"
#include "estlab/dmrs.hpp"
#include "estlab/errors.hpp"
#include "estlab/estimators.hpp"
#include "estlab/harness.hpp"
#include "estlab/numerics.hpp"
