#pragma once

#include "casimir/config.hpp"
#include "casimir/constants.hpp"
#include "casimir/data_io.hpp"
#include "casimir/errors.hpp"
#include "casimir/interpolation.hpp"
#include "casimir/kramers_kronig.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/response.hpp"
#include "casimir/statistics.hpp"
#include "casimir/svg_plot.hpp"
