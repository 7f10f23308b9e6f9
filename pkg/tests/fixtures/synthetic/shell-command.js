$ npm install --save left-pad