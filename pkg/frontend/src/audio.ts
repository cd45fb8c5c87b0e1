import type { Tone } from "./types.js";

/** Structural subset of AudioContext used here; tests inject a recorder. */
export interface ToneContext {
  readonly currentTime: number;
  readonly destination: AudioNode;
  createOscillator(): OscillatorNode;
  createStereoPanner(): StereoPannerNode;
  createGain(): GainNode;
}

const TONE_GAIN = 0.2;

/** Schedule one served tone. Frequency, pan and duration go in verbatim;
 * the client never re-derives audio parameters from contributions.
 */
export function playTone(context: ToneContext, tone: Tone, when?: number): void {
  const start = when ?? context.currentTime;
  const oscillator = context.createOscillator();
  const panner = context.createStereoPanner();
  const gain = context.createGain();
  oscillator.frequency.value = tone.frequency;
  panner.pan.value = tone.pan;
  gain.gain.value = TONE_GAIN;
  oscillator.connect(panner);
  panner.connect(gain);
  gain.connect(context.destination);
  oscillator.start(start);
  oscillator.stop(start + tone.duration_ms / 1000);
}

/** Play a track back to back in served order. */
export function playAllTones(context: ToneContext, tones: readonly Tone[]): void {
  let offset = 0;
  for (const tone of tones) {
    playTone(context, tone, context.currentTime + offset);
    offset += tone.duration_ms / 1000;
  }
}
