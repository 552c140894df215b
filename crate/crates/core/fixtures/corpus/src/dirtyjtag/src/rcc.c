#include <stdint.h>
#include "rcc.h"

/** @brief Select the source of Microcontroller Clock Output
 * Exact sources available depend on your target.
 * On devices with multiple MCO pins, this function controls MCO1
 * @param[in] mcosrc the unshifted source bits
 */
void rcc_set_mco(uint32_t mcosrc)
{
	RCC_CFGR = (RCC_CFGR & ~(RCC_CFGR_MCO_MASK << RCC_CFGR_MCO_SHIFT)) |
		(mcosrc << RCC_CFGR_MCO_SHIFT);
}

/**
 * Turn on an oscillator and wait until it reports ready.
 * @param osc oscillator to enable
 */
void rcc_osc_on(enum rcc_osc osc)
{
	switch (osc) {
	case RCC_HSE:
		RCC_CR |= RCC_CR_HSEON;
		while (!(RCC_CR & RCC_CR_HSERDY));
		break;
	case RCC_HSI:
		RCC_CR |= RCC_CR_HSION;
		while (!(RCC_CR & RCC_CR_HSIRDY));
		break;
	}
}

/**
 * Turn off an oscillator and wait until it reports stopped.
 * @param osc oscillator to disable
 */
void rcc_osc_off(enum rcc_osc osc)
{
	switch (osc) {
	case RCC_HSE:
		RCC_CR &= ~RCC_CR_HSEON;
		while (RCC_CR & RCC_CR_HSERDY);
		break;
	case RCC_HSI:
		RCC_CR &= ~RCC_CR_HSION;
		while (RCC_CR & RCC_CR_HSIRDY);
		break;
	}
}

/*
 * Active la sortie USB et configure les broches du port.
 */
void usb_enable(void)
{
	RCC_APB1ENR |= RCC_APB1ENR_USBEN;
	gpio_set_mode(GPIOA, GPIO_MODE_AF, GPIO11 | GPIO12);
}
