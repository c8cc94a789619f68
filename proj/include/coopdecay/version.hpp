#pragma once

#define COOPDECAY_VERSION "0.1.0"
