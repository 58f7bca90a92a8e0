#pragma once

// Umbrella include for the whole library.

#include "dwellcert/certificate.hpp"
#include "dwellcert/certify.hpp"
#include "dwellcert/eig.hpp"
#include "dwellcert/example_systems.hpp"
#include "dwellcert/expm.hpp"
#include "dwellcert/io.hpp"
#include "dwellcert/lmi.hpp"
#include "dwellcert/matrix.hpp"
#include "dwellcert/parallel.hpp"
#include "dwellcert/rng.hpp"
#include "dwellcert/sdp.hpp"
#include "dwellcert/system.hpp"
#include "dwellcert/verify.hpp"
#include "dwellcert/version.hpp"
