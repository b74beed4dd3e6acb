#pragma once

#include "polarorder/channel.hpp"
#include "polarorder/delta.hpp"
#include "polarorder/infoset.hpp"
#include "polarorder/ordering.hpp"
#include "polarorder/polar.hpp"
#include "polarorder/serialize.hpp"
#include "polarorder/simplex.hpp"
