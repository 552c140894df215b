#include <stdint.h>
#include <stdbool.h>
#include "jtag.h"

static uint32_t tick_count;

// Drive one clock cycle on TCK with the given TMS and TDI levels.
static bool jtag_tick(bool tms, bool tdi)
{
	gpio_write(JTAG_TMS, tms);
	gpio_write(JTAG_TDI, tdi);
	gpio_set(JTAG_TCK);
	tick_count++;
	gpio_clear(JTAG_TCK);
	return gpio_read(JTAG_TDO);
}

/**
 * Set a GPIO pin high.
 * @param pin pin number
 */
void jtag_pin_high(uint32_t pin)
{
	GPIOB_BSRR = 1u << pin;
}

/**
 * Set a GPIO pin low.
 * @param pin pin number
 */
void jtag_pin_low(uint32_t pin)
{
	GPIOB_BRR = 1u << pin;
}

/* FIXME: reset sequence is not verified on every target */
void jtag_reset(void)
{
	for (int i = 0; i < 5; i++)
		jtag_tick(true, false);
	jtag_tick(false, false);
}

/**
 * Shift a sequence of bits through the scan chain, least significant bit
 * first, and collect the bits read back on TDO.
 */
uint32_t jtag_shift(uint32_t out, int len)
{
	uint32_t in = 0;
	for (int i = 0; i < len; i++) {
		bool bit = jtag_tick(i == len - 1, (out >> i) & 1);
		in |= (uint32_t)bit << i;
	}
	return in;
}

uint32_t jtag_ticks(void)
{
	return tick_count;
}
