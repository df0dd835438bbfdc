#pragma once

#include "fringeworks/errors.hpp"
#include "fringeworks/profile.hpp"
#include "fringeworks/quantum.hpp"
#include "fringeworks/optics.hpp"
#include "fringeworks/experiment.hpp"
#include "fringeworks/config.hpp"
#include "fringeworks/report_io.hpp"
#include "fringeworks/version.hpp"
