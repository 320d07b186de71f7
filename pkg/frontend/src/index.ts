export * from './types.js';
export * from './client.js';
export * from './views.js';
export * from './review.js';
